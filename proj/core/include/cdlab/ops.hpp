// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cdlab/tape.hpp"

// Differentiable primitives. Every function records one node on the tape
// owning its operands and throws ContractError on shape mismatch.
namespace cdlab::ops {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);

/// x[..., n] + b[n], broadcasting b over all leading axes.
Var add_rowwise(Var x, Var b);
/// x[..., n] * g[n], broadcasting g over all leading axes.
Var mul_rowwise(Var x, Var g);

/// a[..., k] @ b[k, n] (or b[n, k]^T when trans_b). Leading axes of a are
/// treated as rows and kept in the result shape.
Var matmul(Var a, Var b, bool trans_b = false);
/// Batched a[g, m, k] @ b[g, k, n] (or b[g, n, k]^T when trans_b).
Var bmm(Var a, Var b, bool trans_b = false);

/// x[..., in] @ w[out, in]^T + bias[out]; bias may be an invalid Var.
Var linear(Var x, Var w, Var bias);

Var reshape(Var x, Shape shape);
Var permute(Var x, std::vector<std::size_t> perm);
Var concat(std::span<const Var> parts, std::size_t axis);
Var slice(Var x, std::size_t axis, std::size_t start, std::size_t length);

Var sum(Var x);
Var mean(Var x);

Var sigmoid(Var x);
Var tanh(Var x);
/// Tanh-approximated GELU.
Var gelu(Var x);

/// Softmax over the last axis.
Var softmax(Var x);
/// Zero-mean, unit-variance normalization over the last axis (no affine).
Var layer_norm(Var x, double eps = 1e-5);

}  // namespace cdlab::ops
