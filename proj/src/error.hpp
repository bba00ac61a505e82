// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace seqset {

enum class ErrorKind {
  Dimension,
  Domain,
  EmptySupport,
  EmptyReduction,
  Shape,
  Evaluation,
  Ingestion,
  Schema,
  Label,
  DegenerateSample,
  Capacity,
  Lookup,
  UnsupportedClass,
  Config,
  Divergence,
  TaskMismatch,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Input-side failures map to exit code 2, numerical failures to 3.
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace seqset
