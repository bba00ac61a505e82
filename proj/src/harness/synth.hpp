// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0
//
// Planted-signal benchmark: key tokens placed in one designated modality
// decide the label; every other token is i.i.d. noise.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "data/schema.hpp"
#include "data/sequence_set.hpp"

namespace seqset::harness {

struct SynthSpec {
  std::size_t modalities = 3;
  std::size_t vocab_size = 200;
  std::size_t min_len = 3;
  std::size_t max_len = 8;
  data::Task task = data::Task::Binary;
  std::size_t num_classes = 3;  // multilabel classes or regression levels
  std::size_t key_modality = 0;
  std::size_t n_train = 2000, n_valid = 500, n_test = 500;
  std::uint64_t seed = 42;

  static SynthSpec from_json(const nlohmann::json& doc);
  nlohmann::ordered_json to_json() const;
};

struct SynthDataset {
  data::ModalitySchema schema;
  std::vector<data::SequenceSet> train, valid, test;
  nlohmann::ordered_json manifest;
};

SynthDataset generate_synth(const SynthSpec& spec);

// Writes schema.json, train/valid/test.jsonl, manifest.json and a ready-to-run
// config.json into out_dir. Returns the manifest.
nlohmann::ordered_json write_synth(const SynthDataset& data, const std::string& out_dir);

// The planted rule applied to a sample's tokens.
data::Label planted_label(const data::SequenceSet& sample, const nlohmann::json& manifest);

}  // namespace seqset::harness
