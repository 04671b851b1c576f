// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/train/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fmt/format.h>

#include "cdlab/binary_io.hpp"
#include "cdlab/config.hpp"
#include "cdlab/rng.hpp"

namespace cdlab::train {

Var mse_loss(const CVar& pred, const CVar& target) {
  if (pred.shape() != target.shape()) {
    throw ContractError("mse_loss: shape mismatch " + to_string(pred.shape()) + " vs " + to_string(target.shape()));
  }
  if (pred.shape().empty() || pred.shape()[0] == 0) throw ContractError("mse_loss: empty batch");
  Var dr = ops::sub(target.re, pred.re);
  Var di = ops::sub(target.im, pred.im);
  Var total = ops::add(ops::sum(ops::mul(dr, dr)), ops::sum(ops::mul(di, di)));
  return ops::scale(total, 1.0 / static_cast<double>(pred.shape()[0]));
}

double lr_at(std::uint64_t step, double width, std::uint64_t warmup) {
  if (step == 0) throw ContractError("lr_at: step must be >= 1");
  if (warmup == 0) throw ContractError("lr_at: warmup must be >= 1");
  if (!(width > 0.0)) throw ContractError("lr_at: width must be positive");
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(warmup);
  return std::min(1.0 / std::sqrt(s), (s / w) / std::sqrt(w)) / std::sqrt(width);
}

AdamState AdamState::for_params(const ParameterSet& params) {
  AdamState st;
  for (const auto& p : params) {
    st.m.emplace_back(p.value.shape());
    st.v.emplace_back(p.value.shape());
  }
  return st;
}

void AdamState::validate(const ParameterSet& params) const {
  if (m.size() != params.size() || v.size() != params.size()) {
    throw ContractError(fmt::format("adam: {} moment slots for {} parameters", m.size(), params.size()));
  }
  std::size_t i = 0;
  for (const auto& p : params) {
    if (m[i].shape() != p.value.shape() || v[i].shape() != p.value.shape()) {
      throw ContractError("adam: moment shape mismatch for " + p.name);
    }
    ++i;
  }
}

void adam_step(ParameterSet& params, AdamState& st, double lr) {
  st.validate(params);
  for (const auto& p : params) {
    if (p.grad.shape() != p.value.shape()) throw ContractError("adam: gradient shape mismatch for " + p.name);
    if (!p.grad.all_finite()) throw TrainingError("adam: non-finite gradient in " + p.name);
  }
  ++st.step;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  std::size_t i = 0;
  for (auto& p : params) {
    double* w = p.value.raw();
    const double* g = p.grad.raw();
    double* m = st.m[i].raw();
    double* v = st.v[i].raw();
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      m[k] = st.beta1 * m[k] + (1.0 - st.beta1) * g[k];
      v[k] = st.beta2 * v[k] + (1.0 - st.beta2) * g[k] * g[k];
      w[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + st.eps);
    }
    ++i;
  }
}

void TrainConfig::validate() const {
  if (batch == 0) throw ContractError("train: batch must be >= 1");
  if (warmup == 0) throw ContractError("train: warmup must be >= 1");
  if (!(augment_ratio >= 0.0 && augment_ratio <= 1.0)) throw ContractError("train: augment_ratio must be in [0, 1]");
}

Batch assemble_batch(const nets::ModelSpec& spec, std::span<const sim::ChannelSequence> windows) {
  const std::size_t B = windows.size();
  if (B == 0) throw ContractError("assemble_batch: no windows");
  const auto omega = sim::PilotPattern::make(spec.nt, spec.nc, spec.nt0, spec.nc0);
  const std::size_t slot = spec.nt * spec.nc;
  const std::size_t pslot = spec.nt0 * spec.nc0;
  Batch out{ComplexTensor({B, spec.n, spec.nt, spec.nc}), ComplexTensor({B, spec.nt0, spec.nc0}),
            ComplexTensor({B, spec.nt, spec.nc})};
  auto put = [](ComplexTensor& dst, std::size_t offset, const CMatrix& H) {
    const auto src = H.data();
    for (std::size_t k = 0; k < src.size(); ++k) {
      dst.re[offset + k] = src[k].real();
      dst.im[offset + k] = src[k].imag();
    }
  };
  for (std::size_t b = 0; b < B; ++b) {
    const auto& w = windows[b];
    if (w.size() != spec.n + 1) {
      throw ContractError(fmt::format("assemble_batch: window {} has {} slots, want {}", b, w.size(), spec.n + 1));
    }
    for (std::size_t t = 0; t <= spec.n; ++t) {
      if (w[t].rows() != spec.nt || w[t].cols() != spec.nc) {
        throw ContractError(fmt::format("assemble_batch: window {} slot {} is {}x{}, want {}x{}", b, t, w[t].rows(),
                                        w[t].cols(), spec.nt, spec.nc));
      }
    }
    for (std::size_t t = 0; t < spec.n; ++t) put(out.past, (b * spec.n + t) * slot, w[t]);
    put(out.target, b * slot, w[spec.n]);
    put(out.pilot, b * pslot, sim::extract_pilot(w[spec.n], omega));
  }
  return out;
}

namespace {

sim::ChannelSequence subsequence(const sim::ChannelSequence& s, std::size_t start, std::size_t len) {
  sim::ChannelSequence out;
  out.mobility = s.mobility;
  out.seed = s.seed;
  out.slots.assign(s.slots.begin() + static_cast<std::ptrdiff_t>(start),
                   s.slots.begin() + static_cast<std::ptrdiff_t>(start + len));
  if (!s.positions.empty()) {
    out.positions.assign(s.positions.begin() + static_cast<std::ptrdiff_t>(start),
                         s.positions.begin() + static_cast<std::ptrdiff_t>(start + len));
  }
  return out;
}

std::size_t uniform_index(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

}  // namespace

std::vector<sim::ChannelSequence> sample_windows(const sim::Dataset& data, const nets::ModelSpec& spec,
                                                 const TrainConfig& cfg, std::uint64_t step) {
  const std::size_t len = spec.n + 1;
  std::vector<const sim::ChannelSequence*> eligible;
  for (const auto& s : data.sequences) {
    if (s.size() >= len) eligible.push_back(&s);
  }
  if (eligible.empty()) throw ContractError(fmt::format("train: no sequence holds a window of {} slots", len));

  Rng rng(derive_seed(cfg.seed, "batch", step));
  const auto augmented = static_cast<std::size_t>(std::lround(cfg.augment_ratio * static_cast<double>(cfg.batch)));
  const std::size_t span_cfg = cfg.augment_span ? cfg.augment_span : 2 * len;
  std::vector<sim::ChannelSequence> out;
  out.reserve(cfg.batch);
  for (std::size_t b = 0; b < cfg.batch; ++b) {
    const auto& s = *eligible[uniform_index(rng, eligible.size())];
    if (b < augmented) {
      const std::size_t span = std::min(span_cfg, s.size());
      const std::size_t start = uniform_index(rng, s.size() - span + 1);
      out.push_back(sim::augment_sequence(subsequence(s, start, span), len, rng()));
    } else {
      out.push_back(subsequence(s, uniform_index(rng, s.size() - len + 1), len));
    }
  }
  return out;
}

ComplexTensor predict(const nets::ModelSpec& spec, const ParameterSet& params, const Batch& batch) {
  Tape tape(false);
  nets::Binder b(tape, params);
  return cops::value(nets::forward(spec, b, cops::bind(tape, batch.past), cops::bind(tape, batch.pilot)));
}

std::string loss_csv(std::span<const LossRow> rows) {
  std::string out = "step,lr,loss\n";
  for (const auto& r : rows) out += fmt::format("{},{:.17g},{:.17g}\n", r.step, r.lr, r.loss);
  return out;
}

TrainState TrainState::fresh(const nets::ModelSpec& spec, const TrainConfig& cfg) {
  spec.validate();
  cfg.validate();
  TrainState st;
  st.spec = spec;
  st.config = cfg;
  st.params = nets::init_params(spec, derive_seed(cfg.seed, "init"));
  st.adam = AdamState::for_params(st.params);
  return st;
}

double loss_and_grad(TrainState& state, const Batch& batch) {
  state.params.zero_grad();
  Tape tape;
  nets::Binder b(tape, state.params);
  CVar pred = nets::forward(state.spec, b, cops::bind(tape, batch.past), cops::bind(tape, batch.pilot));
  Var loss = mse_loss(pred, cops::bind(tape, batch.target));
  const double value = loss.value().item();
  if (!std::isfinite(value)) throw TrainingError(fmt::format("non-finite loss at step {}", state.step + 1));
  tape.backward(loss);
  return value;
}

double train_step(TrainState& state, const sim::Dataset& data) {
  const std::uint64_t step = state.step + 1;
  const auto windows = sample_windows(data, state.spec, state.config, step);
  const Batch batch = assemble_batch(state.spec, windows);
  const double loss = loss_and_grad(state, batch);
  const double width = static_cast<double>(state.config.schedule_width ? state.config.schedule_width : state.spec.width);
  const double lr = lr_at(step, width, state.config.warmup);
  try {
    adam_step(state.params, state.adam, lr);
  } catch (const TrainingError& e) {
    throw TrainingError(fmt::format("step {}: {}", step, e.what()));
  }
  state.step = step;
  state.trace.push_back({step, lr, loss});
  return loss;
}

void train(TrainState& state, const sim::Dataset& data, const CheckpointHook& on_checkpoint) {
  state.config.validate();
  while (state.step < state.config.steps) {
    train_step(state, data);
    const auto every = state.config.checkpoint_interval;
    if (on_checkpoint && every && state.step % every == 0) on_checkpoint(state);
  }
}

namespace {

const Tensor& require(const Checkpoint& ckpt, const std::string& name) {
  const Tensor* t = ckpt.find(name);
  if (!t) throw FormatError("checkpoint: missing array " + name);
  return *t;
}

}  // namespace

Checkpoint to_checkpoint(const TrainState& st) {
  ConfigMap m;
  write_prefixed(m, "model.", st.spec);
  write_prefixed(m, "train.", st.config);
  m.set("state.step", format_value(static_cast<unsigned long long>(st.step)));
  m.set("state.adam_step", format_value(static_cast<unsigned long long>(st.adam.step)));
  m.set("state.beta1", format_value(st.adam.beta1));
  m.set("state.beta2", format_value(st.adam.beta2));
  m.set("state.eps", format_value(st.adam.eps));
  m.set("state.init_seed", format_value(static_cast<unsigned long long>(st.params.init_seed)));

  Checkpoint ckpt;
  ckpt.manifest = m.to_text();
  append_parameters(ckpt, st.params, "param.");
  std::size_t i = 0;
  for (const auto& p : st.params) {
    ckpt.arrays.push_back({"adam.m." + p.name, st.adam.m[i]});
    ckpt.arrays.push_back({"adam.v." + p.name, st.adam.v[i]});
    ++i;
  }
  Tensor trace({st.trace.size(), 3});
  for (std::size_t r = 0; r < st.trace.size(); ++r) {
    trace[3 * r] = static_cast<double>(st.trace[r].step);
    trace[3 * r + 1] = st.trace[r].lr;
    trace[3 * r + 2] = st.trace[r].loss;
  }
  ckpt.arrays.push_back({"trace", std::move(trace)});
  return ckpt;
}

LoadedModel load_model(const Checkpoint& ckpt) {
  const ConfigMap m = ConfigMap::parse(ckpt.manifest, "checkpoint manifest");
  LoadedModel out;
  out.spec = read_prefixed<nets::ModelSpec>(m, "model.");
  out.spec.validate();
  out.params = nets::init_params(out.spec, 0);
  restore_parameters(ckpt, out.params, "param.");
  if (auto s = m.get("state.init_seed")) {
    unsigned long long seed = 0;
    parse_value(*s, seed);
    out.params.init_seed = seed;
  }
  return out;
}

TrainState from_checkpoint(const Checkpoint& ckpt) {
  ConfigMap m = ConfigMap::parse(ckpt.manifest, "checkpoint manifest");
  auto number = [&](const char* key, auto& out) {
    const auto text = m.get(key);
    if (!text) throw FormatError(std::string("checkpoint: manifest lacks ") + key);
    parse_value(*text, out);
  };
  TrainState st;
  LoadedModel model = load_model(ckpt);
  st.spec = model.spec;
  st.params = std::move(model.params);
  st.config = read_prefixed<TrainConfig>(m, "train.");
  unsigned long long step = 0, adam_step = 0;
  number("state.step", step);
  number("state.adam_step", adam_step);
  st.step = step;
  st.adam.step = adam_step;
  number("state.beta1", st.adam.beta1);
  number("state.beta2", st.adam.beta2);
  number("state.eps", st.adam.eps);
  for (const auto& p : st.params) {
    st.adam.m.push_back(require(ckpt, "adam.m." + p.name));
    st.adam.v.push_back(require(ckpt, "adam.v." + p.name));
  }
  st.adam.validate(st.params);
  const Tensor& trace = require(ckpt, "trace");
  if (trace.rank() != 2 || trace.dim(1) != 3 || trace.dim(0) != st.step) {
    throw FormatError("checkpoint: trace shape " + to_string(trace.shape()) + " disagrees with step count");
  }
  for (std::size_t r = 0; r < trace.dim(0); ++r) {
    st.trace.push_back({static_cast<std::uint64_t>(trace[3 * r]), trace[3 * r + 1], trace[3 * r + 2]});
  }
  return st;
}

}  // namespace cdlab::train
