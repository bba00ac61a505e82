// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "harness/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "data/sequence_set.hpp"
#include "tensor/tensor.hpp"

namespace seqset::harness {

namespace {
std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
}  // namespace

nlohmann::ordered_json ExplainReport::to_json() const {
  auto mods = nlohmann::ordered_json::array();
  for (const auto& m : modalities) {
    auto tokens = nlohmann::ordered_json::array();
    for (const auto& t : m.tokens) tokens.push_back({{"token", t.token}, {"intra_weight", t.weight}});
    mods.push_back({{"name", m.name}, {"empty", m.empty}, {"inter_weight", m.inter_weight}, {"tokens", tokens}});
  }
  nlohmann::ordered_json j = {{"id", id}, {"output", output}};
  if (!probabilities.empty()) j["probabilities"] = probabilities;
  j["modalities"] = mods;
  return j;
}

ExplainReport explain_sample(const mra::Model& model, const train::Dataset& dataset, std::size_t index) {
  ad::NoGradGuard guard;
  const auto& sample = dataset.samples.at(index);
  const auto result = train::forward_sample(model, dataset, index);
  const auto tokens = data::canonical_tokens(sample, model.schema());

  ExplainReport r;
  r.id = sample.id;
  r.output.assign(result.prediction.values().begin(), result.prediction.values().end());
  if (model.config().task != data::Task::Regression) {
    for (double z : r.output) r.probabilities.push_back(1.0 / (1.0 + std::exp(-z)));
  }
  const auto& att = result.attention;
  for (std::size_t m = 0; m < model.schema().size(); ++m) {
    ModalityExplanation e;
    e.name = model.schema().name(m);
    e.empty = att.empty[m];
    e.inter_weight = att.inter[m];
    for (std::size_t t = 0; t < att.intra[m].size(); ++t) e.tokens.push_back({tokens[m].at(t), att.intra[m][t]});
    r.modalities.push_back(std::move(e));
  }
  return r;
}

std::string render_html(const std::vector<ExplainReport>& reports) {
  std::ostringstream os;
  os << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Attention report</title>\n"
     << "<style>body{font-family:sans-serif;margin:2em}section{margin-bottom:2em}"
     << "h3{padding:4px 8px;margin:8px 0 4px}span.tok{padding:2px 4px;margin:1px;display:inline-block;"
     << "border-radius:3px}.empty{color:#888;font-style:italic}</style></head><body>\n";
  for (const auto& r : reports) {
    os << "<section><h2>" << escape(r.id) << "</h2><p>output:";
    for (double v : r.output) os << ' ' << number(v);
    if (!r.probabilities.empty()) {
      os << " &middot; probability:";
      for (double v : r.probabilities) os << ' ' << number(v);
    }
    os << "</p>\n";
    for (const auto& m : r.modalities) {
      os << "<h3 style=\"background:rgba(220,0,0," << number(m.inter_weight) << ")\" title=\"inter weight "
         << number(m.inter_weight) << "\">" << escape(m.name) << " (" << number(m.inter_weight) << ")</h3>\n<div>";
      if (m.empty) os << "<span class=\"empty\">empty modality</span>";
      double peak = 0.0;
      for (const auto& t : m.tokens) peak = std::max(peak, t.weight);
      for (const auto& t : m.tokens) {
        const double shade = peak > 0 ? t.weight / peak : 0.0;
        os << "<span class=\"tok\" style=\"background:rgba(220,0,0," << number(shade) << ")\" title=\"intra weight "
           << number(t.weight) << "\">" << escape(t.token) << "</span>";
      }
      os << "</div>\n";
    }
    os << "</section>\n";
  }
  os << "</body></html>\n";
  return os.str();
}

}  // namespace seqset::harness
