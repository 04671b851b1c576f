// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include "cdlab/ops.hpp"

namespace cdlab {

/// Complex value as a pair of same-shape real tensors.
struct ComplexTensor {
  Tensor re;
  Tensor im;

  ComplexTensor() = default;
  ComplexTensor(Tensor r, Tensor i);
  explicit ComplexTensor(const Shape& shape) : re(shape), im(shape) {}
  const Shape& shape() const { return re.shape(); }

  friend bool operator==(const ComplexTensor&, const ComplexTensor&) = default;
};

/// Complex value on a tape. Differentiation runs through the real and
/// imaginary parts independently on one real-valued tape.
struct CVar {
  Var re;
  Var im;

  const Shape& shape() const { return re.shape(); }
};

namespace cops {

CVar bind(Tape& tape, const ComplexTensor& value);
CVar leaf(Tape& tape, const ComplexTensor& value);
ComplexTensor value(const CVar& x);

CVar add(const CVar& a, const CVar& b);

/// Complex affine map along the last axis:
///   re = xr Wr^T - xi Wi^T + br,  im = xr Wi^T + xi Wr^T + bi
/// with W of shape [out, in]. Bias parts may be invalid Vars.
CVar linear(const CVar& x, const CVar& w, const CVar& bias);

/// Complex affine map along `axis` of x (the other axes are batch).
CVar linear_along(const CVar& x, std::size_t axis, const CVar& w, const CVar& bias);

/// Real activation applied separately to the real and imaginary parts.
CVar split_gelu(const CVar& x);

CVar permute(const CVar& x, const std::vector<std::size_t>& perm);
CVar reshape(const CVar& x, const Shape& shape);

/// [..., n] complex -> [..., 2n] real as [re | im] on the last axis.
Var to_real(const CVar& x);
/// Inverse of to_real.
CVar from_real(Var x);

}  // namespace cops
}  // namespace cdlab
