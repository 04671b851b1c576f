// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/tape.hpp"

namespace cdlab {

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("var: use of unbound value");
  return tape_->value(*this);
}

const Tensor& BackwardContext::output() const { return tape_.nodes_[node_].val(); }

const Tensor& BackwardContext::input(std::size_t i) const {
  return tape_.nodes_[tape_.nodes_[node_].inputs.at(i)].val();
}

bool BackwardContext::needs_grad(std::size_t i) const {
  return tape_.nodes_[tape_.nodes_[node_].inputs.at(i)].requires_grad;
}

Tensor& BackwardContext::grad_in(std::size_t i) { return tape_.grad_buffer(tape_.nodes_[node_].inputs.at(i)); }

Tape::Tape(bool recording) : recording_(recording) {
#ifdef NDEBUG
  finite_checks_ = false;
#else
  finite_checks_ = true;
#endif
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.op = "constant";
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.op = "leaf";
  n.value = std::move(value);
  n.requires_grad = recording_;
  return push(std::move(n));
}

Var Tape::param(Parameter& p) {
  Node n;
  n.op = "param";
  n.external = &p.value;
  n.param = recording_ ? &p : nullptr;
  n.requires_grad = recording_;
  return push(std::move(n));
}

Var Tape::param(const Parameter& p) {
  Node n;
  n.op = "param";
  n.external = &p.value;
  return push(std::move(n));
}

void Tape::check_owner(Var v, std::string_view op) const {
  if (v.tape() != this) {
    throw ContractError(std::string(op) + ": operand is not recorded on this tape");
  }
}

Var Tape::record(std::string_view op, Tensor value, std::vector<Var> inputs, BackwardFn backward,
                 std::uint64_t scalar_ops) {
  if (consumed_) throw ContractError(std::string(op) + ": tape already consumed by backward()");
  Node n;
  n.op = op;
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  bool any = false;
  for (const Var& in : inputs) {
    check_owner(in, op);
    n.inputs.push_back(in.id());
    any = any || nodes_[in.id()].requires_grad;
  }
  if (recording_ && any && backward) {
    n.requires_grad = true;
    n.backward = std::move(backward);
  }
  if (finite_checks_ && !n.value.all_finite()) nonfinite_ops_.emplace_back(op);
  scalar_ops_ += scalar_ops;
  return push(std::move(n));
}

const Tensor& Tape::value(Var v) const {
  check_owner(v, "value");
  return nodes_[v.id()].val();
}

const Tensor* Tape::grad(Var v) const {
  check_owner(v, "grad");
  const Node& n = nodes_[v.id()];
  return n.grad.empty() ? nullptr : &n.grad;
}

Tensor& Tape::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(n.val().shape(), 0.0);
  return n.grad;
}

void Tape::backward(Var loss) {
  check_owner(loss, "backward");
  if (!recording_) throw ContractError("backward: tape was created without recording");
  if (consumed_) throw ContractError("backward: tape already consumed; build a new tape per step");
  const Node& root = nodes_[loss.id()];
  if (root.val().size() != 1) throw ContractError("backward: loss must be scalar, got " + to_string(root.val().shape()));
  consumed_ = true;
  if (!root.requires_grad) return;

  grad_buffer(loss.id()).fill(1.0);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.backward) {
      BackwardContext ctx(*this, i, n.grad);
      n.backward(ctx);
    }
    if (n.param) {
      auto dst = n.param->grad.data();
      auto src = n.grad.data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
  }
}

}  // namespace cdlab
