// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/complex_ops.hpp"

#include <array>

namespace cdlab {

ComplexTensor::ComplexTensor(Tensor r, Tensor i) : re(std::move(r)), im(std::move(i)) {
  if (re.shape() != im.shape()) {
    throw ContractError("complex: re/im shapes differ " + to_string(re.shape()) + " vs " + to_string(im.shape()));
  }
}

namespace cops {

CVar bind(Tape& tape, const ComplexTensor& v) { return {tape.constant(v.re), tape.constant(v.im)}; }

CVar leaf(Tape& tape, const ComplexTensor& v) { return {tape.leaf(v.re), tape.leaf(v.im)}; }

ComplexTensor value(const CVar& x) { return ComplexTensor(x.re.value(), x.im.value()); }

CVar add(const CVar& a, const CVar& b) { return {ops::add(a.re, b.re), ops::add(a.im, b.im)}; }

CVar linear(const CVar& x, const CVar& w, const CVar& bias) {
  if (x.re.shape() != x.im.shape()) throw ContractError("complex linear: re/im shapes differ");
  const Var none;
  Var rr = ops::linear(x.re, w.re, bias.re);
  Var ii = ops::linear(x.im, w.im, none);
  Var ri = ops::linear(x.re, w.im, bias.im);
  Var ir = ops::linear(x.im, w.re, none);
  return {ops::sub(rr, ii), ops::add(ri, ir)};
}

CVar linear_along(const CVar& x, std::size_t axis, const CVar& w, const CVar& bias) {
  const std::size_t rank = x.shape().size();
  if (axis >= rank) throw ContractError("complex linear: axis " + std::to_string(axis) + " of " + to_string(x.shape()));
  if (axis == rank - 1) return linear(x, w, bias);
  std::vector<std::size_t> perm(rank);
  for (std::size_t i = 0; i < rank; ++i) perm[i] = i;
  std::swap(perm[axis], perm[rank - 1]);
  return permute(linear(permute(x, perm), w, bias), perm);
}

CVar split_gelu(const CVar& x) { return {ops::gelu(x.re), ops::gelu(x.im)}; }

CVar permute(const CVar& x, const std::vector<std::size_t>& perm) {
  return {ops::permute(x.re, perm), ops::permute(x.im, perm)};
}

CVar reshape(const CVar& x, const Shape& shape) { return {ops::reshape(x.re, shape), ops::reshape(x.im, shape)}; }

Var to_real(const CVar& x) {
  const std::array<Var, 2> parts{x.re, x.im};
  return ops::concat(parts, x.shape().size() - 1);
}

CVar from_real(Var x) {
  const Shape& s = x.shape();
  const std::size_t axis = s.size() - 1;
  if (s[axis] % 2 != 0) throw ContractError("complex from_real: odd last axis in " + to_string(s));
  const std::size_t half = s[axis] / 2;
  return {ops::slice(x, axis, 0, half), ops::slice(x, axis, half, half)};
}

}  // namespace cops
}  // namespace cdlab
