// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "data/schema.hpp"
#include "data/sequence_set.hpp"
#include "tensor/tensor.hpp"

namespace seqset::train {

// literal: only the weighted positive term.
// full_bce: weighted positive term plus the unweighted negative term.
enum class WsceMode { FullBce, Literal };

const char* to_string(WsceMode mode) noexcept;
WsceMode parse_wsce_mode(std::string_view text);

struct LossConfig {
  data::Task task = data::Task::Binary;
  std::vector<double> class_weights;  // empty means all ones
  WsceMode wsce_mode = WsceMode::FullBce;
};

// w_k = 1 / N_k over an N x K multi-hot matrix (row-major, K columns).
std::vector<double> class_weights(std::span<const double> labels, std::size_t num_classes);

// logits [N x K]; targets row-major N*K in {0, 1}; weights K entries or empty.
ad::Tensor wsce_loss(const ad::Tensor& logits, std::span<const double> targets, std::span<const double> weights,
                     WsceMode mode);

// sqrt(sum (y - yhat)^2 / N); predictions [N].
ad::Tensor rmse_loss(const ad::Tensor& predictions, std::span<const double> targets);

// Mean loss of one batch of per-sample predictions under the task's loss.
ad::Tensor batch_loss(const std::vector<ad::Tensor>& predictions, const std::vector<const data::Label*>& labels,
                      const LossConfig& config);

}  // namespace seqset::train
