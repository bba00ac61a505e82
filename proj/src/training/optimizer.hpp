// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensor/tensor.hpp"

namespace seqset::train {

enum class ScheduleKind { WarmupCosine, Constant };

// Warmup rises linearly from 0 to peak_lr over warmup_epochs, then a cosine
// decays it to 0 at total_epochs. Positions are fractional epochs
// (step / steps_per_epoch).
struct Schedule {
  ScheduleKind kind = ScheduleKind::WarmupCosine;
  double peak_lr = 0.001;
  double warmup_epochs = 5.0;
  double total_epochs = 25.0;
  std::size_t steps_per_epoch = 1;
};

double lr_at(std::size_t global_step, const Schedule& schedule);

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

struct OptimizedParam {
  std::string name;
  ad::Tensor tensor;
  bool decay = false;
};

// Adam with bias correction and decoupled weight decay:
//   theta <- theta * (1 - lr * lambda) - lr * m_hat / (sqrt(v_hat) + eps)
// Decay applies only to params flagged for it.
class AdamW {
 public:
  AdamW(std::vector<OptimizedParam> params, AdamWConfig config, Schedule schedule);

  // Update with lr_at(step_count()), then advance the step counter.
  void step();
  void step_with_lr(double lr);

  std::size_t step_count() const noexcept { return step_; }
  double last_lr() const noexcept { return last_lr_; }
  const Schedule& schedule() const noexcept { return schedule_; }
  const std::vector<double>& first_moment(std::size_t i) const { return m_.at(i); }
  const std::vector<double>& second_moment(std::size_t i) const { return v_.at(i); }

 private:
  std::vector<OptimizedParam> params_;
  AdamWConfig config_;
  Schedule schedule_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t step_ = 0;
  double last_lr_ = 0.0;
};

}  // namespace seqset::train
