// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"

namespace seqset::ad {

using detail::make_result;
using detail::TensorImpl;
using Inputs = std::span<const std::shared_ptr<TensorImpl>>;

namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    fail(ErrorKind::Dimension, std::string(op) + " expects rank " + std::to_string(rank) + ", got " +
                                   shape_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    fail(ErrorKind::Dimension,
         std::string(op) + " shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

// c[m x n] += a[m x k] * b[k x n]
void gemm_acc(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* brow = b + p * n;
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& a, OpKind op, Fwd fwd, Deriv deriv) {
  std::vector<double> out(a.size());
  const auto in = a.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(in[i]);
  return make_result(a.shape(), std::move(out), op, {a}, [deriv](const TensorImpl& o, Inputs ins) {
    auto& x = *ins[0];
    if (!x.requires_grad) return;
    for (std::size_t i = 0; i < o.values.size(); ++i) x.grad[i] += o.grad[i] * deriv(x.values[i], o.values[i]);
  });
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  const std::size_t m = a.rows(), k = a.cols();
  const bool vec = b.rank() == 1;
  if (!vec && b.rank() != 2) fail(ErrorKind::Dimension, "matmul rhs must be rank 1 or 2, got " + shape_string(b.shape()));
  const std::size_t bk = b.shape()[0];
  const std::size_t n = vec ? 1 : b.shape()[1];
  if (bk != k) {
    fail(ErrorKind::Dimension, "matmul inner dimensions differ: " + shape_string(a.shape()) + " x " +
                                   shape_string(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  gemm_acc(a.values().data(), b.values().data(), out.data(), m, k, n);
  Shape shape = vec ? Shape{m} : Shape{m, n};
  return make_result(std::move(shape), std::move(out), OpKind::MatMul, {a, b},
                     [m, k, n](const TensorImpl& o, Inputs ins) {
                       auto& A = *ins[0];
                       auto& B = *ins[1];
                       const double* g = o.grad.data();
                       if (A.requires_grad) {
                         // dA[i,p] += sum_j g[i,j] * B[p,j]
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t p = 0; p < k; ++p) {
                             double s = 0.0;
                             for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * B.values[p * n + j];
                             A.grad[i * k + p] += s;
                           }
                       }
                       if (B.requires_grad) {
                         // dB[p,j] += sum_i A[i,p] * g[i,j]
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t p = 0; p < k; ++p) {
                             const double av = A.values[i * k + p];
                             for (std::size_t j = 0; j < n; ++j) B.grad[p * n + j] += av * g[i * n + j];
                           }
                       }
                     });
}

Tensor transpose(const Tensor& a) {
  require_rank(a, 2, "transpose");
  const std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  const auto v = a.values();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = v[i * c + j];
  return make_result({c, r}, std::move(out), OpKind::Transpose, {a}, [r, c](const TensorImpl& o, Inputs ins) {
    auto& x = *ins[0];
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) x.grad[i * c + j] += o.grad[j * r + i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return make_result(a.shape(), std::move(out), OpKind::Add, {a, b}, [](const TensorImpl& o, Inputs ins) {
    for (auto& in : ins) {
      if (!in->requires_grad) continue;
      for (std::size_t i = 0; i < o.grad.size(); ++i) in->grad[i] += o.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) - b.at(i);
  return make_result(a.shape(), std::move(out), OpKind::Sub, {a, b}, [](const TensorImpl& o, Inputs ins) {
    if (ins[0]->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) ins[0]->grad[i] += o.grad[i];
    if (ins[1]->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) ins[1]->grad[i] -= o.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  return make_result(a.shape(), std::move(out), OpKind::Mul, {a, b}, [](const TensorImpl& o, Inputs ins) {
    auto& x = *ins[0];
    auto& y = *ins[1];
    if (x.requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) x.grad[i] += o.grad[i] * y.values[i];
    if (y.requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) y.grad[i] += o.grad[i] * x.values[i];
  });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * factor;
  return make_result(a.shape(), std::move(out), OpKind::Scale, {a}, [factor](const TensorImpl& o, Inputs ins) {
    for (std::size_t i = 0; i < o.grad.size(); ++i) ins[0]->grad[i] += o.grad[i] * factor;
  });
}

Tensor tanh(const Tensor& a) {
  const bool faulty = current_fault() == Fault::TanhBackward;
  return unary(
      a, OpKind::Tanh, [](double x) { return std::tanh(x); },
      [faulty](double, double y) { return faulty ? 1.0 + y * y : 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, OpKind::Sigmoid, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Tensor log(const Tensor& a) {
  for (double v : a.values()) {
    if (!(v > 0.0)) fail(ErrorKind::Domain, "log of non-positive value " + std::to_string(v));
  }
  return unary(
      a, OpKind::Log, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor log_sigmoid(const Tensor& a) {
  return unary(
      a, OpKind::LogSigmoid, [](double x) { return std::min(x, 0.0) - std::log1p(std::exp(-std::abs(x))); },
      [](double x, double) { return stable_sigmoid(-x); });
}

Tensor sqrt(const Tensor& a) {
  for (double v : a.values()) {
    if (!(v >= 0.0)) fail(ErrorKind::Domain, "sqrt of negative value " + std::to_string(v));
  }
  return unary(
      a, OpKind::Sqrt, [](double x) { return std::sqrt(x); },
      [](double, double y) { return y > 0.0 ? 0.5 / y : 0.0; });
}

Tensor scale_by_scalar(const Tensor& x, const Tensor& s) {
  if (s.shape() != Shape{1}) fail(ErrorKind::Dimension, "scale_by_scalar needs a [1] scalar, got " + shape_string(s.shape()));
  const double f = s.item();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.at(i) * f;
  return make_result(x.shape(), std::move(out), OpKind::ScaleByScalar, {x, s}, [](const TensorImpl& o, Inputs ins) {
    auto& X = *ins[0];
    auto& S = *ins[1];
    if (X.requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) X.grad[i] += o.grad[i] * S.values[0];
    if (S.requires_grad) {
      double acc = 0.0;
      for (std::size_t i = 0; i < o.grad.size(); ++i) acc += o.grad[i] * X.values[i];
      S.grad[0] += acc;
    }
  });
}

Tensor scale_rows(const Tensor& x, const Tensor& a) {
  require_rank(x, 2, "scale_rows");
  require_rank(a, 1, "scale_rows");
  const std::size_t l = x.rows(), d = x.cols();
  if (a.size() != l) {
    fail(ErrorKind::Dimension, "scale_rows weights " + shape_string(a.shape()) + " vs rows of " + shape_string(x.shape()));
  }
  std::vector<double> out(l * d);
  for (std::size_t t = 0; t < l; ++t)
    for (std::size_t j = 0; j < d; ++j) out[t * d + j] = a.at(t) * x.at(t * d + j);
  return make_result(x.shape(), std::move(out), OpKind::ScaleRows, {x, a}, [l, d](const TensorImpl& o, Inputs ins) {
    auto& X = *ins[0];
    auto& A = *ins[1];
    for (std::size_t t = 0; t < l; ++t) {
      double acc = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double g = o.grad[t * d + j];
        if (X.requires_grad) X.grad[t * d + j] += g * A.values[t];
        acc += g * X.values[t * d + j];
      }
      if (A.requires_grad) A.grad[t] += acc;
    }
  });
}

Tensor masked_softmax(const Tensor& scores, const std::vector<bool>& mask) {
  require_rank(scores, 1, "masked_softmax");
  const std::size_t n = scores.size();
  if (mask.size() != n) {
    fail(ErrorKind::Dimension, "masked_softmax mask length " + std::to_string(mask.size()) + " vs scores " +
                                   shape_string(scores.shape()));
  }
  double peak = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) {
      peak = std::max(peak, scores.at(i));
      any = true;
    }
  }
  if (!any) fail(ErrorKind::EmptySupport, "masked_softmax with every position masked out");
  std::vector<double> out(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    out[i] = std::exp(scores.at(i) - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return make_result({n}, std::move(out), OpKind::MaskedSoftmax, {scores}, [n](const TensorImpl& o, Inputs ins) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += o.values[i] * o.grad[i];
    // Masked entries have y == 0 and receive no gradient.
    for (std::size_t i = 0; i < n; ++i) ins[0]->grad[i] += o.values[i] * (o.grad[i] - dot);
  });
}

Tensor softmax_rows(const Tensor& x) {
  require_rank(x, 2, "softmax_rows");
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c; ++j) peak = std::max(peak, x.at(i * c + j));
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) total += out[i * c + j] = std::exp(x.at(i * c + j) - peak);
    for (std::size_t j = 0; j < c; ++j) out[i * c + j] /= total;
  }
  return make_result(x.shape(), std::move(out), OpKind::SoftmaxRows, {x}, [r, c](const TensorImpl& o, Inputs ins) {
    for (std::size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += o.values[i * c + j] * o.grad[i * c + j];
      for (std::size_t j = 0; j < c; ++j)
        ins[0]->grad[i * c + j] += o.values[i * c + j] * (o.grad[i * c + j] - dot);
    }
  });
}

namespace {
Tensor column_reduce(const Tensor& x, bool mean) {
  require_rank(x, 2, mean ? "mean_rows" : "sum_rows");
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0) fail(ErrorKind::EmptyReduction, std::string(mean ? "mean_rows" : "sum_rows") + " over zero rows");
  std::vector<double> out(d, 0.0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t j = 0; j < d; ++j) out[j] += x.at(t * d + j);
  const double f = mean ? 1.0 / static_cast<double>(n) : 1.0;
  if (mean)
    for (double& v : out) v *= f;
  return make_result({d}, std::move(out), mean ? OpKind::MeanRows : OpKind::SumRows, {x},
                     [n, d, f](const TensorImpl& o, Inputs ins) {
                       for (std::size_t t = 0; t < n; ++t)
                         for (std::size_t j = 0; j < d; ++j) ins[0]->grad[t * d + j] += o.grad[j] * f;
                     });
}
}  // namespace

Tensor sum_rows(const Tensor& x) { return column_reduce(x, false); }
Tensor mean_rows(const Tensor& x) { return column_reduce(x, true); }

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.values()) acc += v;
  return make_result({1}, {acc}, OpKind::SumAll, {x}, [](const TensorImpl& o, Inputs ins) {
    for (double& g : ins[0]->grad) g += o.grad[0];
  });
}

Tensor weighted_sum(const Tensor& x, std::span<const double> coeffs) {
  if (coeffs.size() != x.size()) {
    fail(ErrorKind::Dimension, "weighted_sum has " + std::to_string(coeffs.size()) + " coefficients for " +
                                   shape_string(x.shape()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) acc += coeffs[i] * x.at(i);
  std::vector<double> saved(coeffs.begin(), coeffs.end());
  return make_result({1}, {acc}, OpKind::WeightedSum, {x},
                     [saved = std::move(saved)](const TensorImpl& o, Inputs ins) {
                       for (std::size_t i = 0; i < saved.size(); ++i) ins[0]->grad[i] += o.grad[0] * saved[i];
                     });
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> ids) {
  require_rank(table, 2, "gather_rows");
  const std::size_t rows = table.rows(), d = table.cols();
  std::vector<double> out(ids.size() * d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= rows) {
      fail(ErrorKind::Dimension, "gather_rows index " + std::to_string(ids[i]) + " outside table " +
                                     shape_string(table.shape()));
    }
    std::copy_n(table.values().data() + ids[i] * d, d, out.data() + i * d);
  }
  std::vector<std::size_t> saved(ids.begin(), ids.end());
  return make_result({ids.size(), d}, std::move(out), OpKind::GatherRows, {table},
                     [saved = std::move(saved), d](const TensorImpl& o, Inputs ins) {
                       for (std::size_t i = 0; i < saved.size(); ++i)
                         for (std::size_t j = 0; j < d; ++j) ins[0]->grad[saved[i] * d + j] += o.grad[i * d + j];
                     });
}

Tensor slice_rows(const Tensor& x, std::size_t begin, std::size_t end) {
  require_rank(x, 2, "slice_rows");
  const std::size_t d = x.cols();
  if (begin > end || end > x.rows()) {
    fail(ErrorKind::Dimension, "slice_rows [" + std::to_string(begin) + "," + std::to_string(end) + ") of " +
                                   shape_string(x.shape()));
  }
  std::vector<double> out(x.values().begin() + static_cast<std::ptrdiff_t>(begin * d),
                          x.values().begin() + static_cast<std::ptrdiff_t>(end * d));
  return make_result({end - begin, d}, std::move(out), OpKind::SliceRows, {x},
                     [begin, d](const TensorImpl& o, Inputs ins) {
                       for (std::size_t i = 0; i < o.grad.size(); ++i) ins[0]->grad[begin * d + i] += o.grad[i];
                     });
}

Tensor concat_rows(const std::vector<Tensor>& parts, std::size_t cols) {
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_rank(p, 2, "concat_rows");
    if (p.cols() != cols) {
      fail(ErrorKind::Dimension, "concat_rows part " + shape_string(p.shape()) + " vs width " + std::to_string(cols));
    }
    total += p.rows();
  }
  std::vector<double> out;
  out.reserve(total * cols);
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  return make_result({total, cols}, std::move(out), OpKind::ConcatRows, parts, [](const TensorImpl& o, Inputs ins) {
    std::size_t offset = 0;
    for (const auto& in : ins) {
      if (in->requires_grad)
        for (std::size_t i = 0; i < in->values.size(); ++i) in->grad[i] += o.grad[offset + i];
      offset += in->values.size();
    }
  });
}

Tensor stack(const std::vector<Tensor>& rows) {
  if (rows.empty()) fail(ErrorKind::Dimension, "stack of zero rows");
  const std::size_t d = rows.front().size();
  std::vector<double> out;
  out.reserve(rows.size() * d);
  for (const auto& r : rows) {
    require_rank(r, 1, "stack");
    if (r.size() != d) fail(ErrorKind::Dimension, "stack row " + shape_string(r.shape()) + " vs width " + std::to_string(d));
    out.insert(out.end(), r.values().begin(), r.values().end());
  }
  return make_result({rows.size(), d}, std::move(out), OpKind::Stack, rows, [d](const TensorImpl& o, Inputs ins) {
    for (std::size_t r = 0; r < ins.size(); ++r) {
      if (!ins[r]->requires_grad) continue;
      for (std::size_t j = 0; j < d; ++j) ins[r]->grad[j] += o.grad[r * d + j];
    }
  });
}

Tensor element(const Tensor& x, std::size_t index) {
  if (index >= x.size()) {
    fail(ErrorKind::Dimension, "element " + std::to_string(index) + " of " + shape_string(x.shape()));
  }
  return make_result({1}, {x.at(index)}, OpKind::Element, {x}, [index](const TensorImpl& o, Inputs ins) {
    ins[0]->grad[index] += o.grad[0];
  });
}

}  // namespace seqset::ad
