// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0

#include "tensor/tensor.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "error.hpp"

namespace seqset::ad {

namespace {
thread_local bool t_grad_enabled = true;
std::atomic<Fault> g_fault{Fault::None};
}  // namespace

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

const char* to_string(OpKind op) noexcept {
  switch (op) {
    case OpKind::MatMul: return "matmul";
    case OpKind::Transpose: return "transpose";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Mul: return "mul";
    case OpKind::Neg: return "neg";
    case OpKind::Scale: return "scale";
    case OpKind::Tanh: return "tanh";
    case OpKind::Sigmoid: return "sigmoid";
    case OpKind::Log: return "log";
    case OpKind::LogSigmoid: return "log_sigmoid";
    case OpKind::Sqrt: return "sqrt";
    case OpKind::ScaleByScalar: return "scale_by_scalar";
    case OpKind::ScaleRows: return "scale_rows";
    case OpKind::MaskedSoftmax: return "masked_softmax";
    case OpKind::SoftmaxRows: return "softmax_rows";
    case OpKind::SumRows: return "sum_rows";
    case OpKind::MeanRows: return "mean_rows";
    case OpKind::SumAll: return "sum";
    case OpKind::WeightedSum: return "weighted_sum";
    case OpKind::GatherRows: return "gather_rows";
    case OpKind::SliceRows: return "slice_rows";
    case OpKind::ConcatRows: return "concat_rows";
    case OpKind::Stack: return "stack";
    case OpKind::Element: return "element";
  }
  return "unknown";
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  const auto n = element_count(shape);
  return from_values(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::from_values(Shape shape, std::vector<double> values, bool requires_grad) {
  if (element_count(shape) != values.size()) {
    fail(ErrorKind::Dimension, "shape " + shape_string(shape) + " does not hold " +
                                   std::to_string(values.size()) + " values");
  }
  auto impl = std::make_shared<detail::TensorImpl>();
  impl->shape = std::move(shape);
  impl->values = std::move(values);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from_values({1}, {value}, requires_grad); }

std::size_t Tensor::rows() const {
  if (rank() != 2) fail(ErrorKind::Dimension, "rows() on non-matrix " + shape_string(shape()));
  return impl_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) fail(ErrorKind::Dimension, "cols() on non-matrix " + shape_string(shape()));
  return impl_->shape[1];
}

std::span<double> Tensor::mutable_values() {
  if (!is_leaf()) fail(ErrorKind::Shape, "mutable_values() on an interior tape node");
  return impl_->values;
}

double Tensor::item() const {
  if (size() != 1) fail(ErrorKind::Shape, "item() on tensor of shape " + shape_string(shape()));
  return impl_->values[0];
}

std::vector<double> Tensor::grad_values() const {
  if (impl_->grad.empty()) return std::vector<double>(size(), 0.0);
  return impl_->grad;
}

void Tensor::zero_grad() {
  if (!impl_->grad.empty()) std::fill(impl_->grad.begin(), impl_->grad.end(), 0.0);
}

Tensor Tensor::detach() const { return from_values(impl_->shape, impl_->values, false); }

void Tensor::backward() const {
  if (shape() != Shape{1}) fail(ErrorKind::Shape, "backward() needs shape [1], got " + shape_string(shape()));
  if (!impl_->requires_grad) return;

  // Iterative post-order DFS; reversed, it is a topological order from the loss.
  std::vector<detail::TensorImpl*> order;
  std::unordered_set<detail::TensorImpl*> seen;
  std::vector<std::pair<detail::TensorImpl*, std::size_t>> stack;
  stack.emplace_back(impl_.get(), 0);
  seen.insert(impl_.get());
  while (!stack.empty()) {
    auto& [t, next] = stack.back();
    if (t->node && next < t->node->inputs.size()) {
      auto* child = t->node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) stack.emplace_back(child, 0);
      continue;
    }
    order.push_back(t);
    stack.pop_back();
  }

  // Interior gradients are per-pass; leaf gradients accumulate across passes.
  // Each pass is summed from zero and added at the end, so running the same
  // backward twice yields exactly twice the gradient.
  std::vector<std::pair<detail::TensorImpl*, std::vector<double>>> earlier;
  for (auto* t : order) {
    if (t->node) {
      t->grad.assign(t->values.size(), 0.0);
    } else if (!t->grad.empty()) {
      earlier.emplace_back(t, std::move(t->grad));
      t->grad.assign(t->values.size(), 0.0);
    }
  }
  impl_->ensure_grad();
  impl_->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    auto* t = *it;
    if (!t->node) continue;
    for (auto& in : t->node->inputs) {
      if (in->requires_grad) in->ensure_grad();
    }
    t->node->backward(*t, t->node->inputs);
  }
  for (auto& [t, g] : earlier) {
    for (std::size_t i = 0; i < g.size(); ++i) t->grad[i] += g[i];
  }
  // Release interior buffers so a retained graph does not pin memory.
  for (auto* t : order) {
    if (t->node && t != impl_.get()) std::vector<double>().swap(t->grad);
  }
}

void zero_grads(std::span<Tensor> params) {
  for (auto& p : params) p.zero_grad();
}

bool grad_enabled() noexcept { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

void set_fault(Fault fault) noexcept { g_fault.store(fault); }
Fault current_fault() noexcept { return g_fault.load(); }

namespace detail {

Tensor make_result(Shape shape, std::vector<double> values, OpKind op, std::vector<Tensor> inputs,
                   BackwardFn backward) {
  auto result = Tensor::from_values(std::move(shape), std::move(values), false);
  if (!t_grad_enabled) return result;
  bool any = false;
  for (const auto& in : inputs) any = any || in.requires_grad();
  if (!any) return result;
  auto node = std::make_shared<Node>();
  node->op = op;
  node->inputs.reserve(inputs.size());
  for (auto& in : inputs) node->inputs.push_back(in.impl());
  node->backward = std::move(backward);
  result.impl()->requires_grad = true;
  result.impl()->node = std::move(node);
  return result;
}

}  // namespace detail

}  // namespace seqset::ad
