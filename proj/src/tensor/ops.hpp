// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tensor/tensor.hpp"

namespace seqset::ad {

// a [m x k] times b [k x n] -> [m x n]; b may also be a vector [k] -> [m].
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double factor);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
// Throws a domain error on any non-positive input.
Tensor log(const Tensor& a);
// log(sigmoid(x)) evaluated without overflow for large |x|.
Tensor log_sigmoid(const Tensor& a);
// Subgradient 0 at x == 0.
Tensor sqrt(const Tensor& a);

// Every element of x times the differentiable scalar s (shape [1]).
Tensor scale_by_scalar(const Tensor& x, const Tensor& s);
// Row t of x [l x d] times a[t].
Tensor scale_rows(const Tensor& x, const Tensor& a);

// Softmax over the entries where mask is true; masked entries are exactly 0.
Tensor masked_softmax(const Tensor& scores, const std::vector<bool>& mask);
Tensor softmax_rows(const Tensor& x);

Tensor sum_rows(const Tensor& x);
Tensor mean_rows(const Tensor& x);
Tensor sum(const Tensor& x);
// sum_i coeffs[i] * x[i], coeffs held constant.
Tensor weighted_sum(const Tensor& x, std::span<const double> coeffs);

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> ids);
Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end);
// All inputs [l_i x d]; zero-row inputs are allowed.
Tensor concat_rows(const std::vector<Tensor>& parts, std::size_t cols);
// Vectors [d] stacked into [n x d].
Tensor stack(const std::vector<Tensor>& rows);
Tensor element(const Tensor& x, std::size_t index);

}  // namespace seqset::ad
