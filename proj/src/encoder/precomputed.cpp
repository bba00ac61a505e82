// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "encoder/precomputed.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "error.hpp"

namespace seqset::encoder {

PrecomputedStore PrecomputedStore::load(const std::string& path, const data::ModalitySchema& schema,
                                        std::size_t expected_d) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open hidden-state file " + path);
  PrecomputedStore store;
  for (const auto& m : schema.modalities()) store.names_.push_back(m.name);

  std::string text;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path + ":" + std::to_string(line) + ": ";
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Ingestion, where + "malformed JSON (" + e.what() + ")");
    }
    if (!have_header) {
      if (!doc.contains("d") || !doc["d"].is_number_integer() || doc["d"].get<long long>() <= 0) {
        fail(ErrorKind::Ingestion, where + "expected header {\"d\": positive int}");
      }
      store.d_ = doc["d"].get<std::size_t>();
      if (expected_d != 0 && store.d_ != expected_d) {
        fail(ErrorKind::Dimension, where + "hidden size " + std::to_string(store.d_) + " does not match model d=" +
                                       std::to_string(expected_d));
      }
      have_header = true;
      continue;
    }
    try {
      const auto id = doc.at("id").get<std::string>();
      std::vector<std::vector<double>> per_modality(schema.size());
      for (const auto& [name, matrix] : doc.at("modalities").items()) {
        const auto m = schema.index_of(name);
        if (!m) fail(ErrorKind::Schema, where + "unknown modality '" + name + "'");
        for (const auto& row : matrix) {
          if (row.size() != store.d_) {
            fail(ErrorKind::Dimension, where + "row of width " + std::to_string(row.size()) + " in modality '" + name +
                                           "', expected " + std::to_string(store.d_));
          }
          for (const auto& v : row) {
            const double x = v.get<double>();
            if (!std::isfinite(x)) fail(ErrorKind::Ingestion, where + "non-finite hidden state");
            per_modality[*m].push_back(x);
          }
        }
      }
      store.rows_[id] = std::move(per_modality);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Ingestion, where + e.what());
    }
  }
  if (!have_header) fail(ErrorKind::Ingestion, path + ": missing {\"d\": int} header line");
  return store;
}

std::vector<HiddenSequence> PrecomputedStore::get(const std::string& id) const {
  auto it = rows_.find(id);
  if (it == rows_.end()) fail(ErrorKind::Lookup, "no precomputed hidden states for sample '" + id + "'");
  std::vector<HiddenSequence> out;
  for (std::size_t m = 0; m < names_.size(); ++m) {
    const auto& v = it->second[m];
    out.push_back({names_[m], ad::Tensor::from_values({v.size() / d_, d_}, v, false)});
  }
  return out;
}

std::vector<HiddenSequence> load_precomputed(const std::string& path, const std::string& sample_id,
                                             const data::ModalitySchema& schema, std::size_t expected_d) {
  return PrecomputedStore::load(path, schema, expected_d).get(sample_id);
}

void write_precomputed(const std::string& path, std::size_t d,
                       const std::vector<std::pair<std::string, std::vector<HiddenSequence>>>& samples) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << nlohmann::json{{"d", d}}.dump() << '\n';
  for (const auto& [id, seqs] : samples) {
    nlohmann::ordered_json mods = nlohmann::ordered_json::object();
    for (const auto& h : seqs) {
      if (h.states.cols() != d) fail(ErrorKind::Dimension, "hidden sequence width differs from d");
      auto rows = nlohmann::ordered_json::array();
      for (std::size_t r = 0; r < h.states.rows(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < d; ++c) row.push_back(h.states.at(r, c));
        rows.push_back(std::move(row));
      }
      mods[h.modality] = std::move(rows);
    }
    out << nlohmann::ordered_json{{"id", id}, {"modalities", mods}}.dump() << '\n';
  }
}

}  // namespace seqset::encoder
