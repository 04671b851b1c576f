// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/eval/evaluate.hpp"

#include <fmt/format.h>

#include "cdlab/config.hpp"
#include "cdlab/parallel.hpp"
#include "cdlab/rng.hpp"

namespace cdlab::eval {

NetworkAcquirer::NetworkAcquirer(nets::ModelSpec spec, ParameterSet params)
    : Acquirer(std::move(spec)), params_(std::move(params)) {}

ComplexTensor NetworkAcquirer::acquire(const train::Batch& batch) const {
  return train::predict(spec(), params_, batch);
}

std::string_view to_string(DisturbMode m) { return m == DisturbMode::all_inputs ? "all_inputs" : "past_only"; }

DisturbMode parse_disturb_mode(std::string_view text) {
  if (text == "all_inputs") return DisturbMode::all_inputs;
  if (text == "past_only") return DisturbMode::past_only;
  throw ContractError("unknown disturbance mode '" + std::string(text) + "' (all_inputs | past_only)");
}

void parse_value(std::string_view text, DisturbMode& out) { out = parse_disturb_mode(text); }
std::string format_value(DisturbMode m) { return std::string(to_string(m)); }

train::Batch eval_batch(const nets::ModelSpec& spec, const sim::Dataset& test, std::size_t first, std::size_t count,
                        const EvalOptions& opt) {
  if (first + count > test.sequences.size()) throw ContractError("eval_batch: range past end of test set");
  const std::size_t len = spec.n + 1;
  const sim::DisturbanceSpec dist{opt.sigma};
  const auto omega = sim::PilotPattern::make(spec.nt, spec.nc, spec.nt0, spec.nc0);
  std::vector<sim::ChannelSequence> windows;
  std::vector<CMatrix> pilots;
  for (std::size_t i = first; i < first + count; ++i) {
    const auto& s = test.sequences[i];
    if (s.size() < len) {
      throw ContractError(fmt::format("eval: test sequence {} has {} slots, window needs {}", i, s.size(), len));
    }
    sim::ChannelSequence w;
    const std::size_t start = s.size() - len;
    for (std::size_t t = 0; t < len; ++t) {
      sim::ChannelMatrix m = s.slots[start + t];
      if (t < spec.n) m.H = sim::apply_disturbance(m.H, dist, derive_seed(derive_seed(opt.seed, i), start + t));
      w.slots.push_back(std::move(m));
    }
    CMatrix p = sim::extract_pilot(w.slots.back().H, omega);
    if (opt.mode == DisturbMode::all_inputs) p = sim::apply_disturbance(p, dist, derive_seed(opt.seed, "pilot", i));
    pilots.push_back(std::move(p));
    windows.push_back(std::move(w));
  }
  train::Batch b = train::assemble_batch(spec, windows);
  const std::size_t ps = spec.nt0 * spec.nc0;
  for (std::size_t k = 0; k < count; ++k) {
    const auto d = pilots[k].data();
    for (std::size_t e = 0; e < ps; ++e) {
      b.pilot.re[k * ps + e] = d[e].real();
      b.pilot.im[k * ps + e] = d[e].imag();
    }
  }
  return b;
}

EvalReport evaluate(const Acquirer& model, const sim::Dataset& test, std::string_view test_set,
                    const EvalOptions& opt) {
  const auto& spec = model.spec();
  const std::size_t total = test.sequences.size();
  if (total == 0) throw ContractError("evaluate: empty test set");
  if (opt.chunk == 0) throw ContractError("evaluate: chunk must be positive");
  const std::size_t chunks = (total + opt.chunk - 1) / opt.chunk;
  EvalReport r;
  r.model = model.name();
  r.test_set = std::string(test_set);
  r.samples = total;
  r.per_sample_nmse.resize(total);
  r.per_sample_rho.resize(total);
  parallel_for(chunks, opt.jobs, [&](std::size_t c) {
    const std::size_t first = c * opt.chunk;
    const std::size_t count = std::min(opt.chunk, total - first);
    const train::Batch b = eval_batch(spec, test, first, count, opt);
    const ComplexTensor y = model.acquire(b);
    if (y.shape() != b.target.shape()) throw ContractError("evaluate: model output shape mismatch");
    const auto e = nmse_batch(b.target, y);
    const auto rho = cosine_corr_batch(b.target, y);
    std::copy(e.begin(), e.end(), r.per_sample_nmse.begin() + static_cast<std::ptrdiff_t>(first));
    std::copy(rho.begin(), rho.end(), r.per_sample_rho.begin() + static_cast<std::ptrdiff_t>(first));
  });
  r.nmse = mean(r.per_sample_nmse);
  r.nmse_db = to_db(r.nmse);
  r.rho = mean(r.per_sample_rho);

  ConfigMap echo;
  nets::ModelSpec s = spec;
  write_config(echo, s);
  echo.set("sigma", cdlab::format_value(opt.sigma));
  echo.set("mode", format_value(opt.mode));
  echo.set("seed", cdlab::format_value(static_cast<unsigned long long>(opt.seed)));
  echo.set("test_set", r.test_set);
  r.config_echo = echo.to_text();
  return r;
}

std::string reports_csv(std::span<const EvalReport> reports) {
  std::string out = "model,test_set,samples,nmse,nmse_db,rho\n";
  for (const auto& r : reports) {
    out += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", r.model, r.test_set, r.samples, r.nmse, r.nmse_db, r.rho);
  }
  return out;
}

}  // namespace cdlab::eval
