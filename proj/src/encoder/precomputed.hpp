// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0
//
// Hidden-state files: a {"d": int} header line, then one
// {"id": ..., "modalities": {name: [[d reals], ...]}} line per sample.

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "data/schema.hpp"
#include "encoder/encoder.hpp"

namespace seqset::encoder {

class PrecomputedStore {
 public:
  // expected_d == 0 accepts whatever d the header declares.
  static PrecomputedStore load(const std::string& path, const data::ModalitySchema& schema, std::size_t expected_d);

  std::size_t hidden_size() const noexcept { return d_; }
  bool contains(const std::string& id) const { return rows_.count(id) != 0; }
  std::size_t size() const noexcept { return rows_.size(); }
  // Canonical modality order; tensors do not require grad.
  std::vector<HiddenSequence> get(const std::string& id) const;

 private:
  std::size_t d_ = 0;
  std::vector<std::string> names_;
  std::map<std::string, std::vector<std::vector<double>>> rows_;  // id -> per-modality row-major values
};

std::vector<HiddenSequence> load_precomputed(const std::string& path, const std::string& sample_id,
                                             const data::ModalitySchema& schema, std::size_t expected_d);

void write_precomputed(const std::string& path, std::size_t d,
                       const std::vector<std::pair<std::string, std::vector<HiddenSequence>>>& samples);

}  // namespace seqset::encoder
