// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "data/schema.hpp"

namespace seqset::train {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricsReport {
  data::Task task = data::Task::Binary;
  std::size_t samples = 0;
  std::optional<double> f1_micro, f1_macro, f1_samples;
  std::optional<double> accuracy;
  std::optional<double> roc_auc;  // unset when truth holds a single class
  std::optional<double> rmse, mape;
  std::vector<ClassMetrics> per_class;

  nlohmann::ordered_json to_json() const;
};

// Binary matrices are row-major N x K with entries 0 or 1.
// Zero denominators score 1 when prediction and truth are both empty, except
// macro F1, where a class with no support contributes 0.
double f1_micro(std::span<const double> truth, std::span<const double> predicted, std::size_t k);
double f1_macro(std::span<const double> truth, std::span<const double> predicted, std::size_t k);
double f1_samples(std::span<const double> truth, std::span<const double> predicted, std::size_t k);
std::vector<ClassMetrics> per_class_metrics(std::span<const double> truth, std::span<const double> predicted,
                                            std::size_t k);
double accuracy(std::span<const double> truth, std::span<const double> predicted);

// Mann-Whitney rank statistic with midranks for ties.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const double> truth);

double rmse(std::span<const double> truth, std::span<const double> predicted);

inline constexpr double kMapeEpsilon = 1e-8;
double mape(std::span<const double> truth, std::span<const double> predicted);

}  // namespace seqset::train
