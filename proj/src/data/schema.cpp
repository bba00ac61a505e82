// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "data/schema.hpp"

#include <fstream>
#include <set>

#include "error.hpp"

namespace seqset::data {

const char* to_string(Task task) noexcept {
  switch (task) {
    case Task::Multilabel: return "multilabel";
    case Task::Binary: return "binary";
    case Task::Regression: return "regression";
  }
  return "unknown";
}

Task parse_task(std::string_view text) {
  if (text == "multilabel") return Task::Multilabel;
  if (text == "binary") return Task::Binary;
  if (text == "regression") return Task::Regression;
  fail(ErrorKind::Schema, "unknown task '" + std::string(text) + "'");
}

ModalitySchema::ModalitySchema(std::vector<ModalitySpec> modalities, Task task, std::size_t num_classes)
    : modalities_(std::move(modalities)), task_(task), num_classes_(num_classes) {
  if (modalities_.empty()) fail(ErrorKind::Schema, "schema declares no modalities");
  std::set<std::string> seen;
  for (const auto& m : modalities_) {
    if (m.name.empty()) fail(ErrorKind::Schema, "modality with empty name");
    if (!seen.insert(m.name).second) fail(ErrorKind::Schema, "duplicate modality '" + m.name + "'");
    if (m.max_len == 0) fail(ErrorKind::Schema, "modality '" + m.name + "' has max_len 0");
  }
  if (task_ == Task::Multilabel && num_classes_ == 0) fail(ErrorKind::Schema, "multilabel task needs num_classes >= 1");
  if (task_ == Task::Binary) num_classes_ = 1;
  if (task_ == Task::Regression) num_classes_ = 1;
}

ModalitySchema ModalitySchema::from_json(const nlohmann::json& doc) {
  try {
    std::vector<ModalitySpec> mods;
    for (const auto& m : doc.at("modalities")) {
      const auto max_len = m.at("max_len").get<long long>();
      if (max_len <= 0) fail(ErrorKind::Schema, "max_len must be positive");
      mods.push_back({m.at("name").get<std::string>(), static_cast<std::size_t>(max_len)});
    }
    const Task task = parse_task(doc.at("task").get<std::string>());
    std::size_t k = 1;
    if (doc.contains("num_classes")) {
      const auto v = doc.at("num_classes").get<long long>();
      if (v <= 0) fail(ErrorKind::Schema, "num_classes must be positive");
      k = static_cast<std::size_t>(v);
    } else if (task == Task::Multilabel) {
      fail(ErrorKind::Schema, "multilabel schema missing num_classes");
    }
    return ModalitySchema(std::move(mods), task, k);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, std::string("malformed schema: ") + e.what());
  }
}

ModalitySchema ModalitySchema::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open schema file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Schema, path + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json ModalitySchema::to_json() const {
  nlohmann::json mods = nlohmann::json::array();
  for (const auto& m : modalities_) mods.push_back({{"name", m.name}, {"max_len", m.max_len}});
  return {{"modalities", mods}, {"task", to_string(task_)}, {"num_classes", num_classes_}};
}

std::optional<std::size_t> ModalitySchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < modalities_.size(); ++i) {
    if (modalities_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t ModalitySchema::max_unified_length() const noexcept {
  std::size_t n = 1 + modalities_.size();
  for (const auto& m : modalities_) n += m.max_len;
  return n;
}

}  // namespace seqset::data
