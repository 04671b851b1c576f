// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

namespace cdlab::ops {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<RowMat>;
using CMatMap = Eigen::Map<const RowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using CVecMap = Eigen::Map<const Eigen::VectorXd>;

[[noreturn]] void mismatch(std::string_view op, const Shape& a, const Shape& b) {
  throw ContractError(std::string(op) + ": shape mismatch " + to_string(a) + " vs " + to_string(b));
}

Tape& owner(Var a, std::string_view op) {
  if (!a.valid()) throw ContractError(std::string(op) + ": unbound operand");
  return *a.tape();
}

void add_into(Tensor& dst, const Tensor& src) {
  double* d = dst.raw();
  const double* s = src.raw();
  for (std::size_t i = 0, n = dst.size(); i < n; ++i) d[i] += s[i];
}

// Rows = product of all but the last axis.
std::size_t rows_of(const Shape& s) { return numel(s) / s.back(); }

Tensor permuted(const Tensor& in, const std::vector<std::size_t>& perm) {
  const Shape& is = in.shape();
  const std::size_t rank = is.size();
  Shape os(rank);
  for (std::size_t i = 0; i < rank; ++i) os[i] = is[perm[i]];
  std::vector<std::size_t> in_stride(rank, 1);
  for (std::size_t i = rank - 1; i-- > 0;) in_stride[i] = in_stride[i + 1] * is[i + 1];
  // Stride in the input for each output axis.
  std::vector<std::size_t> step(rank);
  for (std::size_t i = 0; i < rank; ++i) step[i] = in_stride[perm[i]];

  Tensor out(os);
  std::vector<std::size_t> idx(rank, 0);
  const double* src = in.raw();
  double* dst = out.raw();
  const std::size_t inner = os[rank - 1];
  const std::size_t inner_step = step[rank - 1];
  std::size_t offset = 0;
  for (std::size_t o = 0, n = out.size(); o < n; o += inner) {
    for (std::size_t k = 0; k < inner; ++k) dst[o + k] = src[offset + k * inner_step];
    // Advance the multi-index over all but the innermost axis.
    for (std::size_t ax = rank - 1; ax-- > 0;) {
      if (++idx[ax] < os[ax]) {
        offset += step[ax];
        break;
      }
      offset -= step[ax] * (os[ax] - 1);
      idx[ax] = 0;
    }
  }
  return out;
}

template <typename F, typename D>
Var unary(std::string_view op, Var x, F f, D dfdx_from_xy, std::uint64_t cost) {
  Tape& t = owner(x, op);
  const Tensor& xv = x.value();
  Tensor y(xv.shape());
  for (std::size_t i = 0; i < xv.size(); ++i) y[i] = f(xv[i]);
  return t.record(
      op, std::move(y), {x},
      [dfdx_from_xy](BackwardContext& ctx) {
        const Tensor& xin = ctx.input(0);
        const Tensor& yout = ctx.output();
        const Tensor& g = ctx.grad_out();
        Tensor& dx = ctx.grad_in(0);
        for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * dfdx_from_xy(xin[i], yout[i]);
      },
      cost * xv.size());
}

}  // namespace

Var add(Var a, Var b) {
  Tape& t = owner(a, "add");
  if (a.shape() != b.shape()) mismatch("add", a.shape(), b.shape());
  Tensor y = a.value();
  add_into(y, b.value());
  const std::size_t n = y.size();
  return t.record(
      "add", std::move(y), {a, b},
      [](BackwardContext& ctx) {
        if (ctx.needs_grad(0)) add_into(ctx.grad_in(0), ctx.grad_out());
        if (ctx.needs_grad(1)) add_into(ctx.grad_in(1), ctx.grad_out());
      },
      n);
}

Var sub(Var a, Var b) {
  Tape& t = owner(a, "sub");
  if (a.shape() != b.shape()) mismatch("sub", a.shape(), b.shape());
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  const std::size_t n = y.size();
  return t.record(
      "sub", std::move(y), {a, b},
      [](BackwardContext& ctx) {
        if (ctx.needs_grad(0)) add_into(ctx.grad_in(0), ctx.grad_out());
        if (ctx.needs_grad(1)) {
          Tensor& d = ctx.grad_in(1);
          const Tensor& g = ctx.grad_out();
          for (std::size_t i = 0; i < g.size(); ++i) d[i] -= g[i];
        }
      },
      n);
}

Var mul(Var a, Var b) {
  Tape& t = owner(a, "mul");
  if (a.shape() != b.shape()) mismatch("mul", a.shape(), b.shape());
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  const std::size_t n = y.size();
  return t.record(
      "mul", std::move(y), {a, b},
      [](BackwardContext& ctx) {
        const Tensor& g = ctx.grad_out();
        if (ctx.needs_grad(0)) {
          Tensor& d = ctx.grad_in(0);
          const Tensor& bv = ctx.input(1);
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * bv[i];
        }
        if (ctx.needs_grad(1)) {
          Tensor& d = ctx.grad_in(1);
          const Tensor& av = ctx.input(0);
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * av[i];
        }
      },
      n);
}

Var scale(Var a, double factor) {
  Tape& t = owner(a, "scale");
  Tensor y = a.value();
  for (double& v : y.data()) v *= factor;
  const std::size_t n = y.size();
  return t.record(
      "scale", std::move(y), {a},
      [factor](BackwardContext& ctx) {
        Tensor& d = ctx.grad_in(0);
        const Tensor& g = ctx.grad_out();
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += factor * g[i];
      },
      n);
}

Var add_rowwise(Var x, Var b) {
  Tape& t = owner(x, "add_rowwise");
  const Shape& xs = x.shape();
  if (b.value().rank() != 1 || b.shape()[0] != xs.back()) mismatch("add_rowwise", xs, b.shape());
  const std::size_t cols = xs.back();
  const std::size_t rows = rows_of(xs);
  Tensor y = x.value();
  const double* bv = b.value().raw();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) y[r * cols + c] += bv[c];
  return t.record(
      "add_rowwise", std::move(y), {x, b},
      [rows, cols](BackwardContext& ctx) {
        const Tensor& g = ctx.grad_out();
        if (ctx.needs_grad(0)) add_into(ctx.grad_in(0), g);
        if (ctx.needs_grad(1)) {
          Tensor& db = ctx.grad_in(1);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) db[c] += g[r * cols + c];
        }
      },
      rows * cols);
}

Var mul_rowwise(Var x, Var gain) {
  Tape& t = owner(x, "mul_rowwise");
  const Shape& xs = x.shape();
  if (gain.value().rank() != 1 || gain.shape()[0] != xs.back()) mismatch("mul_rowwise", xs, gain.shape());
  const std::size_t cols = xs.back();
  const std::size_t rows = rows_of(xs);
  Tensor y = x.value();
  const double* gv = gain.value().raw();
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) y[r * cols + c] *= gv[c];
  return t.record(
      "mul_rowwise", std::move(y), {x, gain},
      [rows, cols](BackwardContext& ctx) {
        const Tensor& g = ctx.grad_out();
        const Tensor& xv = ctx.input(0);
        const Tensor& gv = ctx.input(1);
        if (ctx.needs_grad(0)) {
          Tensor& dx = ctx.grad_in(0);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) dx[r * cols + c] += g[r * cols + c] * gv[c];
        }
        if (ctx.needs_grad(1)) {
          Tensor& dg = ctx.grad_in(1);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) dg[c] += g[r * cols + c] * xv[r * cols + c];
        }
      },
      rows * cols);
}

Var matmul(Var a, Var b, bool trans_b) {
  Tape& t = owner(a, "matmul");
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (bs.size() != 2) mismatch("matmul", as, bs);
  const std::size_t k = as.back();
  const std::size_t m = rows_of(as);
  const std::size_t bk = trans_b ? bs[1] : bs[0];
  const std::size_t n = trans_b ? bs[0] : bs[1];
  if (bk != k) mismatch("matmul", as, bs);

  Shape os = as;
  os.back() = n;
  Tensor y(os);
  CMatMap A(a.value().raw(), m, k);
  CMatMap B(b.value().raw(), bs[0], bs[1]);
  MatMap C(y.raw(), m, n);
  if (trans_b) {
    C.noalias() = A * B.transpose();
  } else {
    C.noalias() = A * B;
  }
  return t.record(
      "matmul", std::move(y), {a, b},
      [m, k, n, trans_b](BackwardContext& ctx) {
        CMatMap G(ctx.grad_out().raw(), m, n);
        const Tensor& bt = ctx.input(1);
        CMatMap B(bt.raw(), bt.shape()[0], bt.shape()[1]);
        if (ctx.needs_grad(0)) {
          MatMap dA(ctx.grad_in(0).raw(), m, k);
          if (trans_b) {
            dA.noalias() += G * B;
          } else {
            dA.noalias() += G * B.transpose();
          }
        }
        if (ctx.needs_grad(1)) {
          CMatMap A(ctx.input(0).raw(), m, k);
          Tensor& db = ctx.grad_in(1);
          MatMap dB(db.raw(), db.shape()[0], db.shape()[1]);
          if (trans_b) {
            dB.noalias() += G.transpose() * A;
          } else {
            dB.noalias() += A.transpose() * G;
          }
        }
      },
      2 * m * k * n);
}

Var bmm(Var a, Var b, bool trans_b) {
  Tape& t = owner(a, "bmm");
  const Shape& as = a.shape();
  const Shape& bs = b.shape();
  if (as.size() != 3 || bs.size() != 3 || as[0] != bs[0]) mismatch("bmm", as, bs);
  const std::size_t groups = as[0], m = as[1], k = as[2];
  const std::size_t bk = trans_b ? bs[2] : bs[1];
  const std::size_t n = trans_b ? bs[1] : bs[2];
  if (bk != k) mismatch("bmm", as, bs);

  Tensor y({groups, m, n});
  for (std::size_t g = 0; g < groups; ++g) {
    CMatMap A(a.value().raw() + g * m * k, m, k);
    CMatMap B(b.value().raw() + g * k * n, bs[1], bs[2]);
    MatMap C(y.raw() + g * m * n, m, n);
    if (trans_b) {
      C.noalias() = A * B.transpose();
    } else {
      C.noalias() = A * B;
    }
  }
  return t.record(
      "bmm", std::move(y), {a, b},
      [groups, m, k, n, trans_b](BackwardContext& ctx) {
        const Shape& bs = ctx.input(1).shape();
        for (std::size_t g = 0; g < groups; ++g) {
          CMatMap G(ctx.grad_out().raw() + g * m * n, m, n);
          CMatMap B(ctx.input(1).raw() + g * k * n, bs[1], bs[2]);
          if (ctx.needs_grad(0)) {
            MatMap dA(ctx.grad_in(0).raw() + g * m * k, m, k);
            if (trans_b) {
              dA.noalias() += G * B;
            } else {
              dA.noalias() += G * B.transpose();
            }
          }
          if (ctx.needs_grad(1)) {
            CMatMap A(ctx.input(0).raw() + g * m * k, m, k);
            MatMap dB(ctx.grad_in(1).raw() + g * k * n, bs[1], bs[2]);
            if (trans_b) {
              dB.noalias() += G.transpose() * A;
            } else {
              dB.noalias() += A.transpose() * G;
            }
          }
        }
      },
      2 * groups * m * k * n);
}

Var linear(Var x, Var w, Var bias) {
  Tape& t = owner(x, "linear");
  const Shape& xs = x.shape();
  const Shape& ws = w.shape();
  if (ws.size() != 2 || ws[1] != xs.back()) mismatch("linear", xs, ws);
  const std::size_t in = ws[1], out = ws[0], m = rows_of(xs);
  const bool has_bias = bias.valid();
  if (has_bias && (bias.value().rank() != 1 || bias.shape()[0] != out)) mismatch("linear", ws, bias.shape());

  Shape os = xs;
  os.back() = out;
  Tensor y(os);
  CMatMap X(x.value().raw(), m, in);
  CMatMap W(w.value().raw(), out, in);
  MatMap Y(y.raw(), m, out);
  Y.noalias() = X * W.transpose();
  if (has_bias) Y.rowwise() += CVecMap(bias.value().raw(), out).transpose();

  std::vector<Var> inputs{x, w};
  if (has_bias) inputs.push_back(bias);
  return t.record(
      "linear", std::move(y), std::move(inputs),
      [m, in, out, has_bias](BackwardContext& ctx) {
        CMatMap G(ctx.grad_out().raw(), m, out);
        if (ctx.needs_grad(0)) {
          CMatMap W(ctx.input(1).raw(), out, in);
          MatMap dX(ctx.grad_in(0).raw(), m, in);
          dX.noalias() += G * W;
        }
        if (ctx.needs_grad(1)) {
          CMatMap X(ctx.input(0).raw(), m, in);
          MatMap dW(ctx.grad_in(1).raw(), out, in);
          dW.noalias() += G.transpose() * X;
        }
        if (has_bias && ctx.needs_grad(2)) {
          VecMap db(ctx.grad_in(2).raw(), out);
          db += G.colwise().sum().transpose();
        }
      },
      2 * m * in * out + (has_bias ? m * out : 0));
}

Var reshape(Var x, Shape shape) {
  Tape& t = owner(x, "reshape");
  if (numel(shape) != x.value().size()) mismatch("reshape", x.shape(), shape);
  Tensor y = x.value().reshaped(std::move(shape));
  return t.record(
      "reshape", std::move(y), {x},
      [](BackwardContext& ctx) {
        Tensor& d = ctx.grad_in(0);
        const Tensor& g = ctx.grad_out();
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
      },
      0);
}

Var permute(Var x, std::vector<std::size_t> perm) {
  Tape& t = owner(x, "permute");
  const std::size_t rank = x.value().rank();
  std::vector<std::size_t> check = perm;
  std::sort(check.begin(), check.end());
  bool valid = perm.size() == rank;
  for (std::size_t i = 0; valid && i < rank; ++i) valid = check[i] == i;
  if (!valid) mismatch("permute", x.shape(), Shape(perm.begin(), perm.end()));

  std::vector<std::size_t> inverse(rank);
  for (std::size_t i = 0; i < rank; ++i) inverse[perm[i]] = i;
  Tensor y = permuted(x.value(), perm);
  return t.record(
      "permute", std::move(y), {x},
      [inverse](BackwardContext& ctx) { add_into(ctx.grad_in(0), permuted(ctx.grad_out(), inverse)); }, 0);
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw ContractError("concat: no operands");
  Tape& t = owner(parts[0], "concat");
  const Shape& s0 = parts[0].shape();
  if (axis >= s0.size()) mismatch("concat", s0, {axis});
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s0[i];
  std::size_t tail = 1;
  for (std::size_t i = axis + 1; i < s0.size(); ++i) tail *= s0[i];

  std::vector<std::size_t> widths;
  std::size_t total_axis = 0;
  for (const Var& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != s0.size()) mismatch("concat", s0, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i != axis && s[i] != s0[i]) mismatch("concat", s0, s);
    }
    widths.push_back(s[axis] * tail);
    total_axis += s[axis];
  }
  Shape os = s0;
  os[axis] = total_axis;
  const std::size_t row = total_axis * tail;
  Tensor y(os);
  std::size_t col = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const double* src = parts[p].value().raw();
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(src + o * widths[p], widths[p], y.raw() + o * row + col);
    }
    col += widths[p];
  }
  return t.record(
      "concat", std::move(y), std::vector<Var>(parts.begin(), parts.end()),
      [widths, outer, row](BackwardContext& ctx) {
        const double* g = ctx.grad_out().raw();
        std::size_t col = 0;
        for (std::size_t p = 0; p < widths.size(); ++p) {
          if (ctx.needs_grad(p)) {
            double* d = ctx.grad_in(p).raw();
            for (std::size_t o = 0; o < outer; ++o)
              for (std::size_t k = 0; k < widths[p]; ++k) d[o * widths[p] + k] += g[o * row + col + k];
          }
          col += widths[p];
        }
      },
      0);
}

Var slice(Var x, std::size_t axis, std::size_t start, std::size_t length) {
  Tape& t = owner(x, "slice");
  const Shape& xs = x.shape();
  if (axis >= xs.size() || length == 0 || start + length > xs[axis]) {
    throw ContractError("slice: [" + std::to_string(start) + ", +" + std::to_string(length) + ") on axis " +
                        std::to_string(axis) + " of " + to_string(xs));
  }
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= xs[i];
  std::size_t tail = 1;
  for (std::size_t i = axis + 1; i < xs.size(); ++i) tail *= xs[i];
  const std::size_t row = xs[axis] * tail;
  const std::size_t width = length * tail;
  const std::size_t off = start * tail;

  Shape os = xs;
  os[axis] = length;
  Tensor y(os);
  for (std::size_t o = 0; o < outer; ++o) std::copy_n(x.value().raw() + o * row + off, width, y.raw() + o * width);
  return t.record(
      "slice", std::move(y), {x},
      [outer, row, width, off](BackwardContext& ctx) {
        const double* g = ctx.grad_out().raw();
        double* d = ctx.grad_in(0).raw();
        for (std::size_t o = 0; o < outer; ++o)
          for (std::size_t k = 0; k < width; ++k) d[o * row + off + k] += g[o * width + k];
      },
      0);
}

Var sum(Var x) {
  Tape& t = owner(x, "sum");
  const Tensor& xv = x.value();
  const double s = std::accumulate(xv.data().begin(), xv.data().end(), 0.0);
  return t.record(
      "sum", Tensor::scalar(s), {x},
      [](BackwardContext& ctx) {
        const double g = ctx.grad_out()[0];
        for (double& d : ctx.grad_in(0).data()) d += g;
      },
      xv.size());
}

Var mean(Var x) {
  Tape& t = owner(x, "mean");
  const Tensor& xv = x.value();
  const double inv = 1.0 / static_cast<double>(xv.size());
  const double s = std::accumulate(xv.data().begin(), xv.data().end(), 0.0) * inv;
  return t.record(
      "mean", Tensor::scalar(s), {x},
      [inv](BackwardContext& ctx) {
        const double g = ctx.grad_out()[0] * inv;
        for (double& d : ctx.grad_in(0).data()) d += g;
      },
      xv.size() + 1);
}

Var sigmoid(Var x) {
  return unary(
      "sigmoid", x, [](double v) { return 1.0 / (1.0 + std::exp(-v)); },
      [](double, double y) { return y * (1.0 - y); }, 4);
}

Var tanh(Var x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); }, [](double, double y) { return 1.0 - y * y; }, 4);
}

Var gelu(Var x) {
  constexpr double kC = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double kA = 0.044715;
  return unary(
      "gelu", x,
      [](double v) { return 0.5 * v * (1.0 + std::tanh(kC * (v + kA * v * v * v))); },
      [](double v, double) {
        const double th = std::tanh(kC * (v + kA * v * v * v));
        return 0.5 * (1.0 + th) + 0.5 * v * (1.0 - th * th) * kC * (1.0 + 3.0 * kA * v * v);
      },
      10);
}

Var softmax(Var x) {
  Tape& t = owner(x, "softmax");
  const Tensor& xv = x.value();
  const std::size_t cols = xv.shape().back();
  const std::size_t rows = xv.size() / cols;
  Tensor y(xv.shape());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.raw() + r * cols;
    double* out = y.raw() + r * cols;
    const double mx = *std::max_element(in, in + cols);
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) z += (out[c] = std::exp(in[c] - mx));
    for (std::size_t c = 0; c < cols; ++c) out[c] /= z;
  }
  return t.record(
      "softmax", std::move(y), {x},
      [rows, cols](BackwardContext& ctx) {
        const Tensor& yv = ctx.output();
        const Tensor& g = ctx.grad_out();
        Tensor& dx = ctx.grad_in(0);
        for (std::size_t r = 0; r < rows; ++r) {
          const std::size_t o = r * cols;
          double dot = 0.0;
          for (std::size_t c = 0; c < cols; ++c) dot += g[o + c] * yv[o + c];
          for (std::size_t c = 0; c < cols; ++c) dx[o + c] += yv[o + c] * (g[o + c] - dot);
        }
      },
      5 * xv.size());
}

Var layer_norm(Var x, double eps) {
  Tape& t = owner(x, "layer_norm");
  const Tensor& xv = x.value();
  const std::size_t cols = xv.shape().back();
  const std::size_t rows = xv.size() / cols;
  Tensor y(xv.shape());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.raw() + r * cols;
    double mu = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mu += in[c];
    mu /= static_cast<double>(cols);
    double var = 0.0;
    for (std::size_t c = 0; c < cols; ++c) var += (in[c] - mu) * (in[c] - mu);
    var /= static_cast<double>(cols);
    const double inv = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = inv;
    for (std::size_t c = 0; c < cols; ++c) y[r * cols + c] = (in[c] - mu) * inv;
  }
  return t.record(
      "layer_norm", std::move(y), {x},
      [rows, cols, inv_std](BackwardContext& ctx) {
        const Tensor& yv = ctx.output();
        const Tensor& g = ctx.grad_out();
        Tensor& dx = ctx.grad_in(0);
        const double invn = 1.0 / static_cast<double>(cols);
        for (std::size_t r = 0; r < rows; ++r) {
          const std::size_t o = r * cols;
          double mg = 0.0, mgy = 0.0;
          for (std::size_t c = 0; c < cols; ++c) {
            mg += g[o + c];
            mgy += g[o + c] * yv[o + c];
          }
          mg *= invn;
          mgy *= invn;
          const double inv = (*inv_std)[r];
          for (std::size_t c = 0; c < cols; ++c) dx[o + c] += inv * (g[o + c] - mg - yv[o + c] * mgy);
        }
      },
      6 * xv.size());
}

}  // namespace cdlab::ops
