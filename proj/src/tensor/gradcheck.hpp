// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "tensor/tensor.hpp"

namespace seqset::ad {

using ScalarFn = std::function<Tensor()>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::vector<double> per_param;  // same order as the params passed in
};

// Central differences against backward(). Relative error per element uses the
// denominator max(|analytic|, |numeric|, 1e-8). epsilon must lie in (0, 1e-2].
GradCheckReport grad_check_detailed(const ScalarFn& f, std::span<Tensor> params, double epsilon);

double grad_check(const ScalarFn& f, std::span<Tensor> params, double epsilon);

}  // namespace seqset::ad
