// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "data/sequence_set.hpp"
#include "encoder/precomputed.hpp"
#include "mra/model.hpp"
#include "training/loss.hpp"
#include "training/metrics.hpp"
#include "training/optimizer.hpp"

namespace seqset::train {

struct Dataset {
  std::vector<data::SequenceSet> samples;
  // Set when the model consumes precomputed encoder states instead of tokens.
  std::shared_ptr<const encoder::PrecomputedStore> hidden;
};

// Precomputed rows must match each sample's truncated token counts.
void check_hidden_alignment(const Dataset& dataset, const data::ModalitySchema& schema);

mra::ForwardResult forward_sample(const mra::Model& model, const Dataset& dataset, std::size_t index);

struct TrainConfig {
  std::size_t epochs = 25;
  std::size_t batch_size = 8;
  ScheduleKind schedule = ScheduleKind::WarmupCosine;
  double peak_lr = 0.001;
  double warmup_epochs = 5.0;
  AdamWConfig adam;
  WsceMode wsce_mode = WsceMode::FullBce;
  bool class_weighting = false;
  std::size_t patience = 5;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 0 is the pre-training pass
  double mean_loss = 0.0;
  double lr = 0.0;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Per epoch: seeded shuffle, then per batch forward, loss, backward, AdamW
// step and gradient reset. Stalled loss over `patience` epochs writes a
// warning to `warnings` (when non-null) and training continues.
std::vector<EpochRecord> train_epochs(mra::Model& model, const Dataset& dataset, const TrainConfig& config,
                                      const EpochCallback& on_epoch = {}, std::ostream* warnings = nullptr);

double mean_loss(const mra::Model& model, const Dataset& dataset, const LossConfig& loss, std::size_t batch_size);

// Raw head outputs per sample (logits or regression values).
std::vector<std::vector<double>> predict_outputs(const mra::Model& model, const Dataset& dataset,
                                                 std::size_t threads = 1);

MetricsReport metrics_from_outputs(const std::vector<std::vector<double>>& outputs,
                                   const std::vector<data::SequenceSet>& samples, data::Task task, double threshold);

MetricsReport evaluate(const mra::Model& model, const Dataset& dataset, double threshold = 0.5,
                       std::size_t threads = 1);

}  // namespace seqset::train
