// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mra/model.hpp"
#include "training/trainer.hpp"

namespace seqset::harness {

struct TokenWeight {
  std::string token;
  double weight = 0.0;
};

struct ModalityExplanation {
  std::string name;
  bool empty = false;
  double inter_weight = 0.0;
  std::vector<TokenWeight> tokens;
};

struct ExplainReport {
  std::string id;
  std::vector<double> output;         // raw head output
  std::vector<double> probabilities;  // sigmoid of output for classification tasks
  std::vector<ModalityExplanation> modalities;

  nlohmann::ordered_json to_json() const;
};

ExplainReport explain_sample(const mra::Model& model, const train::Dataset& dataset, std::size_t index);

// Static page: tokens shaded by intra weight, modality headers by inter weight.
// Exact weights are kept in each element's title.
std::string render_html(const std::vector<ExplainReport>& reports);

}  // namespace seqset::harness
