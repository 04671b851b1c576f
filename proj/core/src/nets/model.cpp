// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/nets/model.hpp"

#include <array>
#include <cmath>
#include <string>

#include "cdlab/config.hpp"
#include "cdlab/ops.hpp"
#include "cdlab/rng.hpp"

namespace cdlab::nets {
namespace {

std::string cat(const std::string& prefix, std::string_view leaf) { return prefix + "." + std::string(leaf); }

// ---- initialization helpers -------------------------------------------

class Initializer {
 public:
  Initializer(ParameterSet& ps, std::uint64_t seed) : ps_(ps), seed_(seed) {}

  // Each tensor draws from its own stream keyed by name, so adding a layer
  // never perturbs the others.
  Tensor uniform(const std::string& name, Shape shape, double stddev) {
    Rng rng(derive_seed(seed_, name));
    const double a = std::sqrt(3.0) * stddev;
    std::uniform_real_distribution<double> u(-a, a);
    Tensor t(std::move(shape));
    for (auto& v : t.data()) v = u(rng);
    return t;
  }

  void real_weight(const std::string& name, std::size_t out, std::size_t in) {
    ps_.add(name, uniform(name, {out, in}, 1.0 / std::sqrt(static_cast<double>(in))));
  }
  void zeros(const std::string& name, Shape shape) { ps_.add(name, Tensor(std::move(shape), 0.0)); }
  void ones(const std::string& name, Shape shape) { ps_.add(name, Tensor(std::move(shape), 1.0)); }

  void complex_weight(const std::string& name, std::size_t out, std::size_t in) {
    const double sd = 1.0 / std::sqrt(2.0 * static_cast<double>(in));
    ps_.add(name + ".re", uniform(name + ".re", {out, in}, sd));
    ps_.add(name + ".im", uniform(name + ".im", {out, in}, sd));
  }
  void complex_identity(const std::string& name, std::size_t n) {
    Tensor eye({n, n}, 0.0);
    for (std::size_t i = 0; i < n; ++i) eye[i * n + i] = 1.0;
    ps_.add(name + ".re", eye);
    ps_.add(name + ".im", Tensor({n, n}, 0.0));
  }
  void complex_zeros(const std::string& name, std::size_t n) {
    zeros(name + ".re", {n});
    zeros(name + ".im", {n});
  }

  // Complex projection along one axis; identity when square.
  void projection(const std::string& prefix, std::size_t out, std::size_t in) {
    if (out == in) {
      complex_identity(cat(prefix, "w"), in);
    } else {
      complex_weight(cat(prefix, "w"), out, in);
    }
    complex_zeros(cat(prefix, "b"), out);
  }

  void mixing_block(const std::string& prefix, std::size_t n) {
    ones(cat(prefix, "ln.g"), {2 * n});
    zeros(cat(prefix, "ln.b"), {2 * n});
    complex_weight(cat(prefix, "fc1.w"), 2 * n, n);
    complex_zeros(cat(prefix, "fc1.b"), 2 * n);
    complex_weight(cat(prefix, "fc2.w"), n, 2 * n);
    complex_zeros(cat(prefix, "fc2.b"), n);
  }

  void cmixer(const std::string& prefix, std::size_t ni, std::size_t ci, std::size_t no, std::size_t co,
              std::size_t depth) {
    projection(cat(prefix, "in.ant"), no, ni);
    projection(cat(prefix, "in.sub"), co, ci);
    for (std::size_t k = 0; k < depth; ++k) {
      const std::string l = cat(prefix, "l" + std::to_string(k));
      mixing_block(cat(l, "ant"), no);
      mixing_block(cat(l, "sub"), co);
    }
    projection(cat(prefix, "out.ant"), no, no);
    projection(cat(prefix, "out.sub"), co, co);
  }

  void linear(const std::string& prefix, std::size_t out, std::size_t in) {
    real_weight(cat(prefix, "w"), out, in);
    zeros(cat(prefix, "b"), {out});
  }

  void lstm(const std::string& prefix, std::size_t width, std::size_t layers) {
    for (std::size_t j = 0; j < layers; ++j) {
      const std::string l = cat(prefix, "l" + std::to_string(j));
      real_weight(cat(l, "wx"), 4 * width, width);
      real_weight(cat(l, "wh"), 4 * width, width);
      zeros(cat(l, "b"), {4 * width});
    }
  }

  void encoder(const std::string& prefix, std::size_t width, std::size_t ff, std::size_t depth) {
    for (std::size_t k = 0; k < depth; ++k) {
      const std::string blk = cat(prefix, "b" + std::to_string(k));
      ones(cat(blk, "ln1.g"), {width});
      zeros(cat(blk, "ln1.b"), {width});
      for (const char* m : {"q", "k", "v", "o"}) linear(cat(blk, std::string("attn.") + m), width, width);
      ones(cat(blk, "ln2.g"), {width});
      zeros(cat(blk, "ln2.b"), {width});
      linear(cat(blk, "ff1"), ff, width);
      linear(cat(blk, "ff2"), width, ff);
    }
  }

  void embedding(const std::string& name, std::size_t width) {
    ps_.add(name, uniform(name, {width}, 1.0 / std::sqrt(static_cast<double>(width))));
  }

 private:
  ParameterSet& ps_;
  std::uint64_t seed_;
};

// [B, ...] complex -> [B, T, 2 nt nc] real tokens (T = 1 when `tokens` is 0).
Var flatten_tokens(const CVar& x, std::size_t batch, std::size_t tokens, std::size_t per_token) {
  const Shape s = tokens ? Shape{batch, tokens, per_token} : Shape{batch, 1, per_token};
  return cops::to_real(cops::reshape(x, s));
}

CVar unflatten(Var x, std::size_t batch, std::size_t nt, std::size_t nc) {
  return cops::reshape(cops::from_real(x), {batch, nt, nc});
}

Var affine_rowwise(Binder& b, const std::string& prefix, Var x) {
  return ops::add_rowwise(ops::mul_rowwise(x, b(cat(prefix, "g"))), b(cat(prefix, "b")));
}

std::size_t batch_of(const CVar& x, const char* what) {
  if (x.shape().empty()) throw ContractError(std::string(what) + ": missing batch axis");
  return x.shape()[0];
}

void expect_shape(const CVar& x, const Shape& want, const char* what) {
  if (x.shape() != want) {
    throw ContractError(std::string(what) + ": expected " + cdlab::to_string(want) + ", got " + cdlab::to_string(x.shape()));
  }
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::rcdnet:
      return "rcdnet";
    case Variant::acdnet:
      return "acdnet";
    case Variant::estimation:
      return "estimation";
    case Variant::prediction:
      return "prediction";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  for (Variant v : {Variant::rcdnet, Variant::acdnet, Variant::estimation, Variant::prediction}) {
    if (text == to_string(v)) return v;
  }
  throw ContractError("variant must be rcdnet, acdnet, estimation or prediction, got '" + std::string(text) + "'");
}

void parse_value(std::string_view text, Variant& out) { out = parse_variant(text); }
std::string format_value(Variant v) { return std::string(to_string(v)); }

void ModelSpec::validate() const {
  auto fail = [](const std::string& m) { throw ContractError("model spec: " + m); };
  if (nt == 0 || nc == 0) fail("nt and nc must be positive");
  if (uses_pilot() && (nt0 == 0 || nt0 > nt || nc0 == 0 || nc0 > nc)) fail("pilot dims must lie in [1, nt] x [1, nc]");
  if (uses_past() && n == 0) fail("n must be at least 1");
  if (variant != Variant::estimation) {
    if (width == 0 || width >= flat_dim()) {
      fail("width S=" + std::to_string(width) + " must satisfy 0 < S < 2*nt*nc=" + std::to_string(flat_dim()));
    }
  }
  if ((variant == Variant::rcdnet || variant == Variant::acdnet) && (k1 == 0 || k2 == 0)) fail("k1 and k2 must be >= 1");
  if (variant == Variant::acdnet) {
    if (k3 == 0) fail("k3 must be >= 1");
    if (heads == 0 || width % heads != 0) fail("heads must divide width");
  }
  if (variant == Variant::estimation && estimation_depth == 0) fail("estimation_depth must be >= 1");
}

std::string ModelSpec::to_manifest() const {
  ConfigMap m;
  write_config(m, *this);
  return m.to_text();
}

ModelSpec ModelSpec::from_manifest(std::string_view text) {
  ConfigMap m = ConfigMap::parse(text, "model manifest");
  ModelSpec s;
  read_config(m, s);
  s.validate();
  return s;
}

Var Binder::operator()(std::string_view name) {
  if (auto it = bound_.find(name); it != bound_.end()) return it->second;
  Var v = mutable_ ? tape_.param(mutable_->at(name)) : tape_.param(params_->at(name));
  bound_.emplace(std::string(name), v);
  return v;
}

CVar Binder::complex(std::string_view name) {
  const std::string base(name);
  return {(*this)(base + ".re"), (*this)(base + ".im")};
}

CVar complex_layer_norm(Binder& b, const std::string& prefix, const CVar& x) {
  Var h = ops::layer_norm(cops::to_real(x));
  return cops::from_real(affine_rowwise(b, prefix, h));
}

CVar mixing_block(Binder& b, const std::string& prefix, const CVar& x) {
  CVar h = complex_layer_norm(b, cat(prefix, "ln"), x);
  h = cops::linear(h, b.complex(cat(prefix, "fc1.w")), b.complex(cat(prefix, "fc1.b")));
  h = cops::split_gelu(h);
  h = cops::linear(h, b.complex(cat(prefix, "fc2.w")), b.complex(cat(prefix, "fc2.b")));
  return cops::add(x, h);
}

CVar cmixer_layer(Binder& b, const std::string& prefix, const CVar& x) {
  const std::vector<std::size_t> swap{0, 2, 1};
  CVar y = cops::permute(mixing_block(b, cat(prefix, "ant"), cops::permute(x, swap)), swap);
  return mixing_block(b, cat(prefix, "sub"), y);
}

CVar cmixer_forward(Binder& b, const std::string& prefix, const CVar& x, std::size_t depth) {
  if (x.shape().size() != 3) throw ContractError("cmixer: expected [batch, rows, cols], got " + cdlab::to_string(x.shape()));
  CVar y = cops::linear_along(x, 1, b.complex(cat(prefix, "in.ant.w")), b.complex(cat(prefix, "in.ant.b")));
  y = cops::linear_along(y, 2, b.complex(cat(prefix, "in.sub.w")), b.complex(cat(prefix, "in.sub.b")));
  for (std::size_t k = 0; k < depth; ++k) y = cmixer_layer(b, cat(prefix, "l" + std::to_string(k)), y);
  y = cops::linear_along(y, 1, b.complex(cat(prefix, "out.ant.w")), b.complex(cat(prefix, "out.ant.b")));
  return cops::linear_along(y, 2, b.complex(cat(prefix, "out.sub.w")), b.complex(cat(prefix, "out.sub.b")));
}

Var lstm_forward(Binder& b, const std::string& prefix, std::span<const Var> seq, std::size_t layers) {
  if (seq.empty()) throw ContractError("lstm: empty sequence");
  std::vector<Var> inputs(seq.begin(), seq.end());
  for (std::size_t j = 0; j < layers; ++j) {
    const std::string l = cat(prefix, "l" + std::to_string(j));
    Var wx = b(cat(l, "wx"));
    Var wh = b(cat(l, "wh"));
    Var bias = b(cat(l, "b"));
    const std::size_t width = wh.shape()[1];
    Var h, c;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
      if (inputs[t].shape().size() != 2 || inputs[t].shape()[1] != wx.shape()[1]) {
        throw ContractError("lstm: input " + cdlab::to_string(inputs[t].shape()) + " does not match width " +
                            std::to_string(wx.shape()[1]));
      }
      Var gates = ops::linear(inputs[t], wx, bias);
      // Zero initial state: the recurrent terms vanish at t = 0.
      if (t > 0) gates = ops::add(gates, ops::matmul(h, wh, true));
      Var i = ops::sigmoid(ops::slice(gates, 1, 0, width));
      Var f = ops::sigmoid(ops::slice(gates, 1, width, width));
      Var g = ops::tanh(ops::slice(gates, 1, 2 * width, width));
      Var o = ops::sigmoid(ops::slice(gates, 1, 3 * width, width));
      c = t > 0 ? ops::add(ops::mul(f, c), ops::mul(i, g)) : ops::mul(i, g);
      h = ops::mul(o, ops::tanh(c));
      inputs[t] = h;
    }
  }
  return inputs.back();
}

Var encoder_block(Binder& b, const std::string& prefix, Var x, std::size_t heads) {
  const Shape s = x.shape();
  if (s.size() != 3) throw ContractError("encoder: expected [batch, tokens, width], got " + cdlab::to_string(s));
  const std::size_t B = s[0], T = s[1], S = s[2];
  if (heads == 0 || S % heads != 0) throw ContractError("encoder: heads must divide width");
  const std::size_t dh = S / heads;
  auto proj = [&](const char* m, Var in) {
    const std::string p = cat(prefix, std::string("attn.") + m);
    return ops::linear(in, b(cat(p, "w")), b(cat(p, "b")));
  };
  auto split_heads = [&](Var v) {
    return ops::reshape(ops::permute(ops::reshape(v, {B, T, heads, dh}), {0, 2, 1, 3}), {B * heads, T, dh});
  };

  Var h = affine_rowwise(b, cat(prefix, "ln1"), ops::layer_norm(x));
  Var q = split_heads(proj("q", h));
  Var k = split_heads(proj("k", h));
  Var v = split_heads(proj("v", h));
  Var att = ops::softmax(ops::scale(ops::bmm(q, k, true), 1.0 / std::sqrt(static_cast<double>(dh))));
  Var ctx = ops::bmm(att, v);
  ctx = ops::reshape(ops::permute(ops::reshape(ctx, {B, heads, T, dh}), {0, 2, 1, 3}), {B, T, S});
  x = ops::add(x, proj("o", ctx));

  Var h2 = affine_rowwise(b, cat(prefix, "ln2"), ops::layer_norm(x));
  Var ff = ops::gelu(ops::linear(h2, b(cat(prefix, "ff1.w")), b(cat(prefix, "ff1.b"))));
  ff = ops::linear(ff, b(cat(prefix, "ff2.w")), b(cat(prefix, "ff2.b")));
  return ops::add(x, ff);
}

Var attention_encoder_forward(Binder& b, const std::string& prefix, Var x, std::size_t depth, std::size_t heads) {
  for (std::size_t k = 0; k < depth; ++k) x = encoder_block(b, cat(prefix, "b" + std::to_string(k)), x, heads);
  return x;
}

CVar premap_stage(const ModelSpec& spec, Binder& b, const CVar& pilot) {
  const std::size_t B = batch_of(pilot, "premap");
  expect_shape(pilot, {B, spec.nt0, spec.nc0}, "premap pilot");
  return cmixer_forward(b, "premap", pilot, spec.k1);
}

CVar interaction_stage(const ModelSpec& spec, Binder& b, const CVar& past, const CVar& premapped) {
  const std::size_t B = batch_of(past, "interaction");
  expect_shape(past, {B, spec.n, spec.nt, spec.nc}, "interaction past window");
  expect_shape(premapped, {B, spec.nt, spec.nc}, "interaction present");
  const std::size_t per = spec.nt * spec.nc;
  const std::array<Var, 2> parts{flatten_tokens(past, B, spec.n, per), flatten_tokens(premapped, B, 0, per)};
  Var tokens = ops::concat(parts, 1);  // [B, n + 1, 2 nt nc]
  tokens = ops::linear(tokens, b("reduce.w"), b("reduce.b"));  // [B, n + 1, S]
  const std::size_t T = spec.n + 1;
  const std::size_t S = spec.width;

  Var out;
  if (spec.variant == Variant::acdnet) {
    Var past_emb = ops::add_rowwise(ops::slice(tokens, 1, 0, spec.n), b("embed.past"));
    Var cur_emb = ops::add_rowwise(ops::slice(tokens, 1, spec.n, 1), b("embed.present"));
    const std::array<Var, 2> seq{past_emb, cur_emb};
    Var enc = attention_encoder_forward(b, "encoder", ops::concat(seq, 1), spec.k3, spec.heads);
    out = ops::reshape(ops::slice(enc, 1, T - 1, 1), {B, S});
  } else {
    std::vector<Var> seq;
    for (std::size_t t = 0; t < T; ++t) seq.push_back(ops::reshape(ops::slice(tokens, 1, t, 1), {B, S}));
    out = lstm_forward(b, "lstm", seq);
  }
  out = ops::linear(out, b("recover.w"), b("recover.b"));
  return unflatten(out, B, spec.nt, spec.nc);
}

CVar detail_stage(const ModelSpec& spec, Binder& b, const CVar& x) { return cmixer_forward(b, "detail", x, spec.k2); }

CVar forward(const ModelSpec& spec, Binder& b, const CVar& past, const CVar& pilot) {
  switch (spec.variant) {
    case Variant::rcdnet:
    case Variant::acdnet:
      return detail_stage(spec, b, interaction_stage(spec, b, past, premap_stage(spec, b, pilot)));
    case Variant::estimation: {
      const std::size_t B = batch_of(pilot, "estimation");
      expect_shape(pilot, {B, spec.nt0, spec.nc0}, "estimation pilot");
      return cmixer_forward(b, "mixer", pilot, spec.estimation_depth);
    }
    case Variant::prediction: {
      const std::size_t B = batch_of(past, "prediction");
      expect_shape(past, {B, spec.n, spec.nt, spec.nc}, "prediction past window");
      Var tokens = flatten_tokens(past, B, spec.n, spec.nt * spec.nc);
      tokens = ops::linear(tokens, b("reduce.w"), b("reduce.b"));
      std::vector<Var> seq;
      for (std::size_t t = 0; t < spec.n; ++t) {
        seq.push_back(ops::reshape(ops::slice(tokens, 1, t, 1), {B, spec.width}));
      }
      Var out = ops::linear(lstm_forward(b, "lstm", seq), b("recover.w"), b("recover.b"));
      return unflatten(out, B, spec.nt, spec.nc);
    }
  }
  throw ContractError("forward: unknown variant");
}

ParameterSet init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  ParameterSet ps;
  ps.init_seed = seed;
  Initializer init(ps, seed);
  const std::size_t D = spec.flat_dim();
  const std::size_t S = spec.width;
  switch (spec.variant) {
    case Variant::rcdnet:
    case Variant::acdnet:
      init.cmixer("premap", spec.nt0, spec.nc0, spec.nt, spec.nc, spec.k1);
      init.linear("reduce", S, D);
      if (spec.variant == Variant::acdnet) {
        init.embedding("embed.past", S);
        init.embedding("embed.present", S);
        init.encoder("encoder", S, spec.ff(), spec.k3);
      } else {
        init.lstm("lstm", S, 2);
      }
      init.linear("recover", D, S);
      init.cmixer("detail", spec.nt, spec.nc, spec.nt, spec.nc, spec.k2);
      break;
    case Variant::estimation:
      init.cmixer("mixer", spec.nt0, spec.nc0, spec.nt, spec.nc, spec.estimation_depth);
      break;
    case Variant::prediction:
      init.linear("reduce", S, D);
      init.lstm("lstm", S, 2);
      init.linear("recover", D, S);
      break;
  }
  return ps;
}

std::uint64_t forward_cost(const ModelSpec& spec, const ParameterSet& params) {
  Tape tape(false);
  Binder b(tape, params);
  const CVar past = cops::bind(tape, spec.uses_past() ? ComplexTensor(Shape{1, spec.n, spec.nt, spec.nc})
                                                      : ComplexTensor(Shape{1, 1, 1, 1}));
  const CVar pilot = cops::bind(tape, spec.uses_pilot() ? ComplexTensor(Shape{1, spec.nt0, spec.nc0})
                                                        : ComplexTensor(Shape{1, 1, 1}));
  const std::uint64_t before = tape.scalar_ops();
  forward(spec, b, past, pilot);
  return tape.scalar_ops() - before;
}

}  // namespace cdlab::nets
