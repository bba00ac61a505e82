// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "training/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "error.hpp"

namespace seqset::train {

double lr_at(std::size_t global_step, const Schedule& s) {
  if (s.steps_per_epoch == 0) fail(ErrorKind::Config, "steps_per_epoch must be positive");
  if (s.kind == ScheduleKind::Constant) return s.peak_lr;
  if (!(s.total_epochs > s.warmup_epochs)) {
    fail(ErrorKind::Config, "total_epochs (" + std::to_string(s.total_epochs) + ") must exceed warmup_epochs (" +
                                std::to_string(s.warmup_epochs) + ")");
  }
  if (s.warmup_epochs < 0) fail(ErrorKind::Config, "warmup_epochs must be non-negative");
  const double e = static_cast<double>(global_step) / static_cast<double>(s.steps_per_epoch);
  if (e < s.warmup_epochs) return s.peak_lr * e / s.warmup_epochs;
  const double progress = std::min(1.0, (e - s.warmup_epochs) / (s.total_epochs - s.warmup_epochs));
  return s.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

AdamW::AdamW(std::vector<OptimizedParam> params, AdamWConfig config, Schedule schedule)
    : params_(std::move(params)), config_(config), schedule_(schedule) {
  for (const auto& p : params_) {
    m_.emplace_back(p.tensor.size(), 0.0);
    v_.emplace_back(p.tensor.size(), 0.0);
  }
}

void AdamW::step() { step_with_lr(lr_at(step_, schedule_)); }

void AdamW::step_with_lr(double lr) {
  for (const auto& p : params_) {
    for (double g : p.tensor.grad()) {
      if (!std::isfinite(g)) fail(ErrorKind::Divergence, "non-finite gradient in parameter '" + p.name + "'");
    }
  }
  ++step_;
  last_lr_ = lr;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    auto theta = p.tensor.mutable_values();
    const auto grad = p.tensor.grad();
    const double shrink = p.decay ? 1.0 - lr * config_.weight_decay : 1.0;
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double g = grad.empty() ? 0.0 : grad[j];
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g;
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      theta[j] = theta[j] * shrink - lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

}  // namespace seqset::train
