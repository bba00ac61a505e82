// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "data/schema.hpp"
#include "data/sequence_set.hpp"

namespace seqset::data {

// Streaming reader for {"id", "modalities", "label"} lines. Modalities the
// line omits are materialised as empty lists after the listed ones.
class JsonlReader {
 public:
  JsonlReader(const std::string& path, const ModalitySchema& schema);

  std::optional<SequenceSet> next();
  std::size_t line_number() const noexcept { return line_; }

 private:
  std::string path_;
  const ModalitySchema& schema_;
  std::ifstream in_;
  std::size_t line_ = 0;
};

std::vector<SequenceSet> load_jsonl(const std::string& path, const ModalitySchema& schema);

SequenceSet parse_sample(const nlohmann::ordered_json& line, const ModalitySchema& schema);
Label parse_label(const nlohmann::ordered_json& value, const ModalitySchema& schema);
nlohmann::ordered_json to_json(const SequenceSet& sample);

void write_jsonl(const std::string& path, const std::vector<SequenceSet>& samples);

}  // namespace seqset::data
