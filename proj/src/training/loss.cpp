// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "training/loss.hpp"

#include <cmath>
#include <string>

#include "error.hpp"
#include "tensor/ops.hpp"

namespace seqset::train {

const char* to_string(WsceMode mode) noexcept { return mode == WsceMode::FullBce ? "full_bce" : "literal"; }

WsceMode parse_wsce_mode(std::string_view text) {
  if (text == "full_bce") return WsceMode::FullBce;
  if (text == "literal" || text == "literal_eq16") return WsceMode::Literal;
  fail(ErrorKind::Config, "unknown wsce_mode '" + std::string(text) + "' (expected full_bce or literal)");
}

std::vector<double> class_weights(std::span<const double> labels, std::size_t num_classes) {
  if (num_classes == 0 || labels.size() % num_classes != 0) {
    fail(ErrorKind::Dimension, "label matrix of " + std::to_string(labels.size()) + " entries is not N x " +
                                   std::to_string(num_classes));
  }
  std::vector<double> counts(num_classes, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) counts[i % num_classes] += labels[i];
  std::vector<double> w(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (counts[k] < 1.0) {
      fail(ErrorKind::UnsupportedClass, "class " + std::to_string(k) + " has no positive training example");
    }
    w[k] = 1.0 / counts[k];
  }
  return w;
}

ad::Tensor wsce_loss(const ad::Tensor& logits, std::span<const double> targets, std::span<const double> weights,
                     WsceMode mode) {
  if (logits.rank() != 2) fail(ErrorKind::Dimension, "wsce_loss logits must be [N x K], got " + ad::shape_string(logits.shape()));
  const std::size_t n = logits.rows(), k = logits.cols();
  if (targets.size() != n * k) {
    fail(ErrorKind::Dimension, "wsce_loss targets hold " + std::to_string(targets.size()) + " entries for logits " +
                                   ad::shape_string(logits.shape()));
  }
  if (!weights.empty() && weights.size() != k) {
    fail(ErrorKind::Dimension, "wsce_loss has " + std::to_string(weights.size()) + " class weights for K=" + std::to_string(k));
  }
  for (double z : logits.values()) {
    if (!std::isfinite(z)) fail(ErrorKind::Divergence, "non-finite logit in wsce_loss");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> pos(n * k), negc(n * k);
  for (std::size_t i = 0; i < n * k; ++i) {
    const double w = weights.empty() ? 1.0 : weights[i % k];
    pos[i] = -inv_n * w * targets[i];
    negc[i] = -inv_n * (1.0 - targets[i]);
  }
  // log sigma(z) and log(1 - sigma(z)) = log sigma(-z), both overflow-free.
  auto loss = ad::weighted_sum(ad::log_sigmoid(logits), pos);
  if (mode == WsceMode::FullBce) loss = ad::add(loss, ad::weighted_sum(ad::log_sigmoid(ad::neg(logits)), negc));
  return loss;
}

ad::Tensor rmse_loss(const ad::Tensor& predictions, std::span<const double> targets) {
  if (predictions.rank() != 1 || predictions.size() != targets.size() || targets.empty()) {
    fail(ErrorKind::Dimension, "rmse_loss predictions " + ad::shape_string(predictions.shape()) + " vs " +
                                   std::to_string(targets.size()) + " targets");
  }
  const auto y = ad::Tensor::from_values({targets.size()}, {targets.begin(), targets.end()});
  const auto diff = ad::sub(predictions, y);
  return ad::sqrt(ad::scale(ad::sum(ad::mul(diff, diff)), 1.0 / static_cast<double>(targets.size())));
}

ad::Tensor batch_loss(const std::vector<ad::Tensor>& predictions, const std::vector<const data::Label*>& labels,
                      const LossConfig& config) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    fail(ErrorKind::Dimension, "batch of " + std::to_string(predictions.size()) + " predictions and " +
                                   std::to_string(labels.size()) + " labels");
  }
  std::vector<double> targets;
  for (const auto* l : labels) targets.insert(targets.end(), l->values.begin(), l->values.end());
  const auto stacked = ad::stack(predictions);
  if (config.task == data::Task::Regression) {
    if (stacked.cols() != 1) fail(ErrorKind::Dimension, "regression needs one output per sample");
    // [N x 1] -> [N]
    return rmse_loss(ad::matmul(stacked, ad::Tensor::from_values({1}, {1.0})), targets);
  }
  return wsce_loss(stacked, targets, config.class_weights, config.wsce_mode);
}

}  // namespace seqset::train
