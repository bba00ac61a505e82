// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "data/jsonl.hpp"

#include <cmath>

#include "error.hpp"

namespace seqset::data {

JsonlReader::JsonlReader(const std::string& path, const ModalitySchema& schema)
    : path_(path), schema_(schema), in_(path) {
  if (!in_) fail(ErrorKind::Io, "cannot open dataset file " + path);
}

std::optional<SequenceSet> JsonlReader::next() {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path_ + ":" + std::to_string(line_) + ": ";
    nlohmann::ordered_json doc;
    try {
      doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Ingestion, where + "malformed JSON (" + e.what() + ")");
    }
    try {
      return parse_sample(doc, schema_);
    } catch (const Error& e) {
      fail(e.kind(), where + e.what());
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Ingestion, where + e.what());
    }
  }
  return std::nullopt;
}

std::vector<SequenceSet> load_jsonl(const std::string& path, const ModalitySchema& schema) {
  JsonlReader reader(path, schema);
  std::vector<SequenceSet> out;
  while (auto s = reader.next()) out.push_back(std::move(*s));
  return out;
}

Label parse_label(const nlohmann::ordered_json& value, const ModalitySchema& schema) {
  Label label{schema.task(), {}};
  switch (schema.task()) {
    case Task::Multilabel: {
      if (!value.is_array() || value.size() != schema.num_classes()) {
        fail(ErrorKind::Label, "multilabel task expects a " + std::to_string(schema.num_classes()) +
                                   "-element 0/1 array, got " + value.dump());
      }
      for (const auto& v : value) {
        if (!v.is_number() || (v.get<double>() != 0.0 && v.get<double>() != 1.0)) {
          fail(ErrorKind::Label, "multi-hot entries must be 0 or 1, got " + v.dump());
        }
        label.values.push_back(v.get<double>());
      }
      break;
    }
    case Task::Binary: {
      if (!value.is_number() || (value.get<double>() != 0.0 && value.get<double>() != 1.0)) {
        fail(ErrorKind::Label, "binary task expects label 0 or 1, got " + value.dump());
      }
      label.values.push_back(value.get<double>());
      break;
    }
    case Task::Regression: {
      if (!value.is_number() || !std::isfinite(value.get<double>())) {
        fail(ErrorKind::Label, "regression task expects a finite number, got " + value.dump());
      }
      label.values.push_back(value.get<double>());
      break;
    }
  }
  return label;
}

SequenceSet parse_sample(const nlohmann::ordered_json& line, const ModalitySchema& schema) {
  if (!line.is_object()) fail(ErrorKind::Ingestion, "record is not a JSON object");
  SequenceSet s;
  s.id = line.at("id").get<std::string>();
  const auto& mods = line.at("modalities");
  if (!mods.is_object()) fail(ErrorKind::Ingestion, "'modalities' must be an object");
  for (auto it = mods.begin(); it != mods.end(); ++it) {
    if (!schema.index_of(it.key())) fail(ErrorKind::Schema, "unknown modality '" + it.key() + "'");
    TokenList tokens;
    for (const auto& t : it.value()) {
      if (!t.is_string()) fail(ErrorKind::Ingestion, "tokens must be strings in modality '" + it.key() + "'");
      tokens.push_back(t.get<std::string>());
    }
    s.sequences.emplace_back(it.key(), std::move(tokens));
  }
  for (const auto& spec : schema.modalities()) {
    if (!s.find(spec.name)) s.sequences.emplace_back(spec.name, TokenList{});
  }
  s.label = parse_label(line.at("label"), schema);
  bool any = false;
  for (const auto& [name, tokens] : s.sequences) any = any || !tokens.empty();
  if (!any) fail(ErrorKind::DegenerateSample, "sample '" + s.id + "' has every modality empty");
  return s;
}

nlohmann::ordered_json to_json(const SequenceSet& sample) {
  nlohmann::ordered_json mods = nlohmann::ordered_json::object();
  for (const auto& [name, tokens] : sample.sequences) mods[name] = tokens;
  nlohmann::ordered_json label;
  if (sample.label.task == Task::Multilabel) {
    label = nlohmann::ordered_json::array();
    for (double v : sample.label.values) label.push_back(static_cast<int>(v));
  } else if (sample.label.task == Task::Binary) {
    label = static_cast<int>(sample.label.values.at(0));
  } else {
    label = sample.label.values.at(0);
  }
  return {{"id", sample.id}, {"modalities", mods}, {"label", label}};
}

void write_jsonl(const std::string& path, const std::vector<SequenceSet>& samples) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  for (const auto& s : samples) out << to_json(s).dump() << '\n';
}

}  // namespace seqset::data
