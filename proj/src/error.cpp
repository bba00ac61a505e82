// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "error.hpp"

namespace seqset {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::EmptySupport: return "empty-support";
    case ErrorKind::EmptyReduction: return "empty-reduction";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Evaluation: return "evaluation";
    case ErrorKind::Ingestion: return "ingestion";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Label: return "label";
    case ErrorKind::DegenerateSample: return "degenerate-sample";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Lookup: return "lookup";
    case ErrorKind::UnsupportedClass: return "unsupported-class";
    case ErrorKind::Config: return "config";
    case ErrorKind::Divergence: return "training-divergence";
    case ErrorKind::TaskMismatch: return "task-mismatch";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain:
    case ErrorKind::EmptySupport:
    case ErrorKind::EmptyReduction:
    case ErrorKind::Shape:
    case ErrorKind::Evaluation:
    case ErrorKind::Divergence:
      return true;
    default:
      return false;
  }
}

}  // namespace seqset
