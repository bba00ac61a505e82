// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "training/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "error.hpp"

namespace seqset::train {

namespace {
void require_matrix(std::span<const double> truth, std::span<const double> predicted, std::size_t k) {
  if (k == 0 || truth.size() != predicted.size() || truth.size() % k != 0) {
    fail(ErrorKind::Dimension, "metric inputs of " + std::to_string(truth.size()) + " and " +
                                   std::to_string(predicted.size()) + " entries with K=" + std::to_string(k));
  }
}

double f1_from_counts(double tp, double fp, double fn, double empty_score) {
  const double denom = 2.0 * tp + fp + fn;
  return denom == 0.0 ? empty_score : 2.0 * tp / denom;
}
}  // namespace

double f1_micro(std::span<const double> truth, std::span<const double> predicted, std::size_t k) {
  require_matrix(truth, predicted, k);
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] > 0.5, p = predicted[i] > 0.5;
    tp += t && p;
    fp += !t && p;
    fn += t && !p;
  }
  return f1_from_counts(tp, fp, fn, 1.0);
}

std::vector<ClassMetrics> per_class_metrics(std::span<const double> truth, std::span<const double> predicted,
                                            std::size_t k) {
  require_matrix(truth, predicted, k);
  std::vector<double> tp(k, 0), fp(k, 0), fn(k, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const std::size_t c = i % k;
    const bool t = truth[i] > 0.5, p = predicted[i] > 0.5;
    tp[c] += t && p;
    fp[c] += !t && p;
    fn[c] += t && !p;
  }
  std::vector<ClassMetrics> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    out[c].support = static_cast<std::size_t>(tp[c] + fn[c]);
    out[c].precision = tp[c] + fp[c] > 0 ? tp[c] / (tp[c] + fp[c]) : 0.0;
    out[c].recall = out[c].support > 0 ? tp[c] / (tp[c] + fn[c]) : 0.0;
    out[c].f1 = out[c].support > 0 ? f1_from_counts(tp[c], fp[c], fn[c], 0.0) : 0.0;
  }
  return out;
}

double f1_macro(std::span<const double> truth, std::span<const double> predicted, std::size_t k) {
  const auto classes = per_class_metrics(truth, predicted, k);
  double total = 0.0;
  for (const auto& c : classes) total += c.f1;
  return total / static_cast<double>(k);
}

double f1_samples(std::span<const double> truth, std::span<const double> predicted, std::size_t k) {
  require_matrix(truth, predicted, k);
  const std::size_t n = truth.size() / k;
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t c = 0; c < k; ++c) {
      const bool t = truth[j * k + c] > 0.5, p = predicted[j * k + c] > 0.5;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    total += f1_from_counts(tp, fp, fn, 1.0);
  }
  return total / static_cast<double>(n);
}

double accuracy(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) fail(ErrorKind::Dimension, "accuracy input sizes");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += (truth[i] > 0.5) == (predicted[i] > 0.5);
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::optional<double> roc_auc(std::span<const double> scores, std::span<const double> truth) {
  if (scores.size() != truth.size()) fail(ErrorKind::Dimension, "roc_auc input sizes");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) rank[order[t]] = mid;
    i = j + 1;
  }
  double positives = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] > 0.5) {
      positives += 1.0;
      rank_sum += rank[i];
    }
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) return std::nullopt;
  return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double rmse(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) fail(ErrorKind::Dimension, "rmse input sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) acc += (truth[i] - predicted[i]) * (truth[i] - predicted[i]);
  return std::sqrt(acc / static_cast<double>(truth.size()));
}

double mape(std::span<const double> truth, std::span<const double> predicted) {
  if (truth.size() != predicted.size() || truth.empty()) fail(ErrorKind::Dimension, "mape input sizes");
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    acc += std::abs(truth[i] - predicted[i]) / std::max(std::abs(truth[i]), kMapeEpsilon);
  }
  return acc / static_cast<double>(truth.size());
}

namespace {
nlohmann::ordered_json optional_value(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}
}  // namespace

nlohmann::ordered_json MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["task"] = data::to_string(task);
  j["samples"] = samples;
  if (task == data::Task::Multilabel) {
    j["f1_micro"] = optional_value(f1_micro);
    j["f1_macro"] = optional_value(f1_macro);
    j["f1_samples"] = optional_value(f1_samples);
  } else if (task == data::Task::Binary) {
    j["accuracy"] = optional_value(accuracy);
    j["roc_auc"] = optional_value(roc_auc);
    j["roc_auc_defined"] = roc_auc.has_value();
    j["f1_micro"] = optional_value(f1_micro);
  } else {
    j["rmse"] = optional_value(rmse);
    j["mape"] = optional_value(mape);
  }
  if (!per_class.empty()) {
    auto classes = nlohmann::ordered_json::array();
    for (const auto& c : per_class) {
      classes.push_back({{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}});
    }
    j["per_class"] = classes;
  }
  return j;
}

}  // namespace seqset::train
