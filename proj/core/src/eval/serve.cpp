// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/eval/serve.hpp"

#include <fmt/format.h>

#include "cdlab/config.hpp"
#include "cdlab/rng.hpp"
#include "cdlab/sim/scene.hpp"

namespace cdlab::eval {

std::string_view to_string(ServeMode m) { return m == ServeMode::ideal_past ? "ideal_past" : "autoregressive"; }

ServeMode parse_serve_mode(std::string_view text) {
  if (text == "ideal_past") return ServeMode::ideal_past;
  if (text == "autoregressive") return ServeMode::autoregressive;
  throw ContractError("unknown serve mode '" + std::string(text) + "' (ideal_past | autoregressive)");
}

void parse_value(std::string_view text, ServeMode& out) { out = parse_serve_mode(text); }
std::string format_value(ServeMode m) { return std::string(to_string(m)); }

ServeLog serve_trajectory(const Acquirer& model, const sim::ChannelSequence& truth, const ServeOptions& opt) {
  const auto& spec = model.spec();
  const std::size_t n = spec.n, len = truth.size();
  if (len <= n) throw ContractError(fmt::format("serve: trajectory has {} slots, needs more than n = {}", len, n));
  for (std::size_t t = 0; t < len; ++t) {
    if (truth[t].rows() != spec.nt || truth[t].cols() != spec.nc) {
      throw ContractError(fmt::format("serve: slot {} is {}x{}, model expects {}x{}", t, truth[t].rows(),
                                      truth[t].cols(), spec.nt, spec.nc));
    }
  }
  if (!(opt.sigma >= 0.0)) throw ContractError("serve: sigma must be nonnegative");

  const sim::DisturbanceSpec dist{opt.sigma};
  const auto omega = sim::PilotPattern::make(spec.nt, spec.nc, spec.nt0, spec.nc0);
  const bool feed_back = opt.mode == ServeMode::autoregressive;
  auto stored = [&](std::size_t k, const CMatrix& H) {
    return sim::apply_disturbance(H, dist, derive_seed(opt.seed, "window", k));
  };

  std::vector<CMatrix> store;  // what the window holds for each slot
  std::vector<bool> deduced;
  for (std::size_t k = 0; k < n; ++k) {
    store.push_back(stored(k, truth[k]));
    deduced.push_back(false);
  }

  ServeLog log;
  log.model = model.name();
  log.mode = opt.mode;
  log.n = n;
  const std::size_t ps = spec.nt0 * spec.nc0;
  for (std::size_t t = n; t < len; ++t) {
    sim::ChannelSequence w;
    ServeRow row;
    row.slot = static_cast<std::int64_t>(t);
    for (std::size_t k = t - n; k < t; ++k) {
      w.slots.push_back({store[k], static_cast<std::int64_t>(k)});
      row.window.push_back({static_cast<std::int64_t>(k), deduced[k]});
    }
    w.slots.push_back({truth[t], static_cast<std::int64_t>(t)});
    train::Batch b = train::assemble_batch(spec, std::span(&w, 1));
    if (opt.disturb == DisturbMode::all_inputs) {
      const CMatrix p = sim::apply_disturbance(sim::extract_pilot(truth[t], omega), dist, derive_seed(opt.seed, "pilot", t));
      const auto d = p.data();
      for (std::size_t e = 0; e < ps; ++e) {
        b.pilot.re[e] = d[e].real();
        b.pilot.im[e] = d[e].imag();
      }
    }
    const ComplexTensor y = model.acquire(b);
    if (y.shape() != b.target.shape()) throw ContractError("serve: model output shape mismatch");
    CMatrix Hhat = sample_matrix(y, 0);
    row.nmse = nmse(truth[t], Hhat);
    row.rho = cosine_corr(truth[t], Hhat);
    store.push_back(stored(t, feed_back ? Hhat : truth[t]));
    deduced.push_back(feed_back);
    log.rows.push_back(std::move(row));
    log.acquired.push_back(std::move(Hhat));
  }
  return log;
}

sim::ChannelSequence serving_trajectory(const sim::ScenarioConfig& cfg, std::uint64_t root_seed, std::size_t length,
                                        sim::Mobility kind) {
  const sim::Scene scene = sim::make_scene(cfg, derive_seed(root_seed, "scene"));
  return sim::generate_sequence(scene, cfg, kind, length, cfg.test_region, derive_seed(root_seed, "serve"));
}

std::string serve_csv(const ServeLog& log) {
  std::string out = "slot,model,mode,nmse,nmse_db,rho,window\n";
  for (const auto& r : log.rows) {
    std::string win;
    for (const auto& e : r.window) {
      if (!win.empty()) win += '|';
      win += fmt::format("{}:{}", e.slot, e.deduced ? "deduced" : "truth");
    }
    out += fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{}\n", r.slot, log.model, to_string(log.mode), r.nmse,
                       to_db(r.nmse), r.rho, win);
  }
  return out;
}

}  // namespace cdlab::eval
