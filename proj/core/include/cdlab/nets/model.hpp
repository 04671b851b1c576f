// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cdlab/cmatrix.hpp"
#include "cdlab/complex_ops.hpp"
#include "cdlab/parameters.hpp"

namespace cdlab::nets {

enum class Variant { rcdnet, acdnet, estimation, prediction };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);
void parse_value(std::string_view text, Variant& out);
std::string format_value(Variant v);

struct ModelSpec {
  Variant variant = Variant::rcdnet;
  std::size_t nt = 32;
  std::size_t nc = 32;
  std::size_t nt0 = 4;
  std::size_t nc0 = 4;
  std::size_t n = 16;
  std::size_t k1 = 3;
  std::size_t k2 = 3;
  std::size_t k3 = 6;
  std::size_t width = 512;  // S
  std::size_t heads = 4;
  std::size_t ff_width = 0;  // 0 means 2 * S
  std::size_t estimation_depth = 8;

  std::size_t flat_dim() const { return 2 * nt * nc; }
  std::size_t ff() const { return ff_width ? ff_width : 2 * width; }
  bool uses_pilot() const { return variant != Variant::prediction; }
  bool uses_past() const { return variant != Variant::estimation; }

  template <class V>
  void visit(V& v) {
    v("variant", variant);
    v("nt", nt);
    v("nc", nc);
    v("nt0", nt0);
    v("nc0", nc0);
    v("n", n);
    v("k1", k1);
    v("k2", k2);
    v("k3", k3);
    v("width", width);
    v("heads", heads);
    v("ff_width", ff_width);
    v("estimation_depth", estimation_depth);
  }

  void validate() const;

  std::string to_manifest() const;
  static ModelSpec from_manifest(std::string_view text);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Binds parameters onto a tape by name. Each name is bound once per
/// binder; trainable binders route gradients into Parameter::grad.
class Binder {
 public:
  Binder(Tape& tape, ParameterSet& params) : tape_(tape), mutable_(&params), params_(&params) {}
  Binder(Tape& tape, const ParameterSet& params) : tape_(tape), params_(&params) {}

  Tape& tape() const { return tape_; }
  Var operator()(std::string_view name);
  /// Complex parameter stored as `name.re` and `name.im`.
  CVar complex(std::string_view name);

 private:
  Tape& tape_;
  ParameterSet* mutable_ = nullptr;
  const ParameterSet* params_;
  std::map<std::string, Var, std::less<>> bound_;
};

// Layer building blocks. Complex activations are laid out [batch, rows, cols].

/// Joint re/im layer norm over the last axis (2N real features) with gain and bias.
CVar complex_layer_norm(Binder& b, const std::string& prefix, const CVar& x);

/// x + W2 gelu(W1 LN(x)) along the last axis, hidden width 2N.
CVar mixing_block(Binder& b, const std::string& prefix, const CVar& x);

/// One CMixer layer: antenna mixing then subcarrier mixing, each residual.
CVar cmixer_layer(Binder& b, const std::string& prefix, const CVar& x);

/// Input projection to (nt_out, nc_out), `depth` layers, square output projection.
CVar cmixer_forward(Binder& b, const std::string& prefix, const CVar& x, std::size_t depth);

/// 2-layer LSTM with zero initial state over a list of [batch, S] inputs.
/// Returns the top layer's final hidden state.
Var lstm_forward(Binder& b, const std::string& prefix, std::span<const Var> seq, std::size_t layers = 2);

/// One pre-norm encoder block on [batch, T, S] tokens.
Var encoder_block(Binder& b, const std::string& prefix, Var x, std::size_t heads);
/// `depth` blocks, no mask, no final norm.
Var attention_encoder_forward(Binder& b, const std::string& prefix, Var x, std::size_t depth, std::size_t heads);

// Model stages; shapes per ModelSpec.

/// [B, nt0, nc0] -> [B, nt, nc]
CVar premap_stage(const ModelSpec& spec, Binder& b, const CVar& pilot);
/// past [B, n, nt, nc] plus H_premapping [B, nt, nc] -> [B, nt, nc]
CVar interaction_stage(const ModelSpec& spec, Binder& b, const CVar& past, const CVar& premapped);
/// [B, nt, nc] -> [B, nt, nc]
CVar detail_stage(const ModelSpec& spec, Binder& b, const CVar& x);

/// Full model. `past` is [B, n, nt, nc] (ignored for estimation), `pilot` is
/// [B, nt0, nc0] (ignored for prediction). Output [B, nt, nc].
CVar forward(const ModelSpec& spec, Binder& b, const CVar& past, const CVar& pilot);

/// Deterministic initialization: fan-in uniform weights (std 1/sqrt(fan_in),
/// split evenly between real and imaginary parts for complex weights), zero
/// biases, unit norm gains, identity for square projections.
ParameterSet init_params(const ModelSpec& spec, std::uint64_t seed);

/// Scalar ops of one inference forward pass at batch size 1.
std::uint64_t forward_cost(const ModelSpec& spec, const ParameterSet& params);

}  // namespace cdlab::nets
