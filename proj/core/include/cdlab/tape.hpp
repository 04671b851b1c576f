// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cdlab/parameters.hpp"
#include "cdlab/tensor.hpp"

namespace cdlab {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the
/// tape lives.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Passed to backward closures. Gives the incoming gradient and lazily
/// allocated accumulators for each input that requires a gradient.
class BackwardContext {
 public:
  const Tensor& grad_out() const { return grad_out_; }
  const Tensor& output() const;
  const Tensor& input(std::size_t i) const;
  bool needs_grad(std::size_t i) const;
  Tensor& grad_in(std::size_t i);

 private:
  friend class Tape;
  BackwardContext(Tape& tape, std::size_t node, const Tensor& grad_out)
      : tape_(tape), node_(node), grad_out_(grad_out) {}
  Tape& tape_;
  std::size_t node_;
  const Tensor& grad_out_;
};

using BackwardFn = std::function<void(BackwardContext&)>;

/// Linear record of forward operations for reverse-mode differentiation.
///
/// One thread records and runs backward. A tape can run backward exactly
/// once; a second call throws. Parameters bound through param() receive
/// their gradients by accumulation into Parameter::grad.
class Tape {
 public:
  explicit Tape(bool recording = true);
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }

  Var constant(Tensor value);
  /// Differentiable input whose gradient is read back with grad().
  Var leaf(Tensor value);
  /// Binds a parameter without copying it. Gradients flow into p.grad.
  Var param(Parameter& p);
  /// Read-only binding; no gradient.
  Var param(const Parameter& p);

  /// Records an op result. `backward` may be empty for non-differentiable ops.
  Var record(std::string_view op, Tensor value, std::vector<Var> inputs, BackwardFn backward,
             std::uint64_t scalar_ops);

  void backward(Var loss);

  const Tensor& value(Var v) const;
  /// Gradient accumulated for a leaf or intermediate; nullptr if none.
  const Tensor* grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  /// Scalar arithmetic operations counted over all recorded forward ops.
  std::uint64_t scalar_ops() const { return scalar_ops_; }

  /// When on, every forward output is checked; non-finite results are
  /// flagged (not thrown) and listed by op name.
  void set_finite_checks(bool on) { finite_checks_ = on; }
  const std::vector<std::string>& nonfinite_ops() const { return nonfinite_ops_; }

  void check_owner(Var v, std::string_view op) const;

 private:
  friend class BackwardContext;

  struct Node {
    std::string_view op;
    Tensor value;
    const Tensor* external = nullptr;
    Parameter* param = nullptr;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Tensor grad;
    bool requires_grad = false;

    const Tensor& val() const { return external ? *external : value; }
  };

  Var push(Node node);
  Tensor& grad_buffer(std::size_t id);

  bool recording_;
  bool consumed_ = false;
  bool finite_checks_;
  std::uint64_t scalar_ops_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::string> nonfinite_ops_;
};

}  // namespace cdlab
