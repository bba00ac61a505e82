// Copyright (c) 2026, seqset developers
// SPDX-License-Identifier: Apache-2.0
//
// Dense float64 arrays with define-by-run reverse-mode differentiation.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace seqset::ad {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

enum class OpKind {
  MatMul,
  Transpose,
  Add,
  Sub,
  Mul,
  Neg,
  Scale,
  Tanh,
  Sigmoid,
  Log,
  LogSigmoid,
  Sqrt,
  ScaleByScalar,
  ScaleRows,
  MaskedSoftmax,
  SoftmaxRows,
  SumRows,
  MeanRows,
  SumAll,
  WeightedSum,
  GatherRows,
  SliceRows,
  ConcatRows,
  Stack,
  Element,
};

const char* to_string(OpKind op) noexcept;

namespace detail {

struct Node;

struct TensorImpl {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::shared_ptr<Node> node;  // null for leaves

  void ensure_grad() {
    if (grad.size() != values.size()) grad.assign(values.size(), 0.0);
  }
};

using BackwardFn =
    std::function<void(const TensorImpl& out, std::span<const std::shared_ptr<TensorImpl>> inputs)>;

// One tape entry. Saved context lives in the backward closure.
struct Node {
  OpKind op;
  std::vector<std::shared_ptr<TensorImpl>> inputs;
  BackwardFn backward;
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor from_values(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return impl_ != nullptr; }
  const Shape& shape() const { return impl_->shape; }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t size() const { return impl_->values.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const { return impl_->values; }
  // Leaf tensors only; mutating an interior node would desynchronise the tape.
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t i) const { return impl_->values[i]; }
  double at(std::size_t r, std::size_t c) const { return impl_->values[r * cols() + c]; }

  bool requires_grad() const { return impl_->requires_grad; }
  bool is_leaf() const { return impl_->node == nullptr; }
  bool has_grad() const { return !impl_->grad.empty(); }
  // Zeros when no gradient has been accumulated yet.
  std::vector<double> grad_values() const;
  std::span<const double> grad() const { return impl_->grad; }
  void zero_grad();

  // Populates grad on every requires_grad tensor reachable from this scalar.
  void backward() const;

  // Same values, no tape history, no gradient tracking.
  Tensor detach() const;

  const std::shared_ptr<detail::TensorImpl>& impl() const { return impl_; }
  explicit Tensor(std::shared_ptr<detail::TensorImpl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<detail::TensorImpl> impl_;
};

void zero_grads(std::span<Tensor> params);

bool grad_enabled() noexcept;

// Disables tape construction on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Test fixture hook: deliberately wrong backward rules, used to show that the
// gradient checker catches them.
enum class Fault { None, TanhBackward };
void set_fault(Fault fault) noexcept;
Fault current_fault() noexcept;

namespace detail {
Tensor make_result(Shape shape, std::vector<double> values, OpKind op, std::vector<Tensor> inputs,
                   BackwardFn backward);
}

}  // namespace seqset::ad
