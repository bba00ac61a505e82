// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace seqset::ad {

namespace {
double evaluate(const ScalarFn& f) {
  NoGradGuard guard;
  const double v = f().item();
  if (!std::isfinite(v)) fail(ErrorKind::Evaluation, "objective is not finite: " + std::to_string(v));
  return v;
}
}  // namespace

GradCheckReport grad_check_detailed(const ScalarFn& f, std::span<Tensor> params, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1e-2)) {
    fail(ErrorKind::Config, "grad_check epsilon must lie in (0, 1e-2], got " + std::to_string(epsilon));
  }
  zero_grads(params);
  const Tensor loss = f();
  if (!std::isfinite(loss.item())) fail(ErrorKind::Evaluation, "objective is not finite");
  loss.backward();

  GradCheckReport report;
  report.per_param.reserve(params.size());
  for (auto& p : params) {
    const auto analytic = p.grad_values();
    auto values = p.mutable_values();
    double worst = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + epsilon;
      const double plus = evaluate(f);
      values[i] = saved - epsilon;
      const double minus = evaluate(f);
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
    }
    report.per_param.push_back(worst);
    report.max_relative_error = std::max(report.max_relative_error, worst);
  }
  zero_grads(params);
  return report;
}

double grad_check(const ScalarFn& f, std::span<Tensor> params, double epsilon) {
  return grad_check_detailed(f, params, epsilon).max_relative_error;
}

}  // namespace seqset::ad
