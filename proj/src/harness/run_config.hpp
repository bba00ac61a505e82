// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "mra/attention.hpp"
#include "training/trainer.hpp"

namespace seqset::harness {

// Everything a run needs. Relative paths in a config file resolve against the
// file's directory; to_json() writes the fully resolved form.
struct RunConfig {
  std::string schema_path;
  std::string train_path, valid_path, test_path;
  std::string train_hidden, valid_hidden, test_hidden;
  mra::ModelConfig model;
  std::size_t min_count = 1;
  train::TrainConfig train;
  double threshold = 0.5;
  std::uint64_t seed = 42;
  std::string out_dir = "run";
  std::size_t threads = 1;

  static RunConfig from_json(const nlohmann::json& doc, const std::string& base_dir);
  static RunConfig load(const std::string& path);
  nlohmann::ordered_json to_json() const;
};

// Applies {"seed": n, "out": dir, ...} style overrides on top of a config.
void apply_overrides(RunConfig& config, const nlohmann::json& overrides);

}  // namespace seqset::harness
