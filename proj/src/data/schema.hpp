// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace seqset::data {

enum class Task { Multilabel, Binary, Regression };

const char* to_string(Task task) noexcept;
Task parse_task(std::string_view text);

struct ModalitySpec {
  std::string name;
  std::size_t max_len = 0;
  bool operator==(const ModalitySpec&) const = default;
};

// Modality names in canonical order. The order given here is the order used
// by every downstream stage, whatever order a sample lists its modalities in.
class ModalitySchema {
 public:
  ModalitySchema(std::vector<ModalitySpec> modalities, Task task, std::size_t num_classes);

  static ModalitySchema from_json(const nlohmann::json& doc);
  static ModalitySchema load(const std::string& path);
  nlohmann::json to_json() const;

  std::size_t size() const noexcept { return modalities_.size(); }
  const std::vector<ModalitySpec>& modalities() const noexcept { return modalities_; }
  const std::string& name(std::size_t m) const { return modalities_.at(m).name; }
  std::size_t max_len(std::size_t m) const { return modalities_.at(m).max_len; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  Task task() const noexcept { return task_; }
  std::size_t num_classes() const noexcept { return num_classes_; }
  // K logits for multilabel, one for binary and regression.
  std::size_t output_dim() const noexcept { return task_ == Task::Multilabel ? num_classes_ : 1; }
  // Longest unified sequence: every modality at its cap plus [C] and M [S].
  std::size_t max_unified_length() const noexcept;

  bool operator==(const ModalitySchema&) const = default;

 private:
  std::vector<ModalitySpec> modalities_;
  Task task_;
  std::size_t num_classes_;
};

}  // namespace seqset::data
