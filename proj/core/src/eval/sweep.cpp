// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/eval/sweep.hpp"

#include <fmt/format.h>

#include "cdlab/binary_io.hpp"
#include "cdlab/config.hpp"
#include "cdlab/parallel.hpp"

namespace cdlab::eval {

ModelStore::ModelStore(std::filesystem::path dir, const sim::Dataset* train_data, bool load_only)
    : dir_(std::move(dir)), train_(train_data), load_only_(load_only) {}

std::string ModelStore::checkpoint_name(const nets::ModelSpec& spec, const train::TrainConfig& cfg) {
  return fmt::format("{}_p{}x{}_n{}_s{}_steps{}_seed{}", nets::to_string(spec.variant), spec.nt0, spec.nc0, spec.n,
                     spec.width, cfg.steps, cfg.seed);
}

std::filesystem::path ModelStore::path_for(const nets::ModelSpec& spec, const train::TrainConfig& cfg) const {
  return dir_ / (checkpoint_name(spec, cfg) + ".ckpt");
}

train::LoadedModel ModelStore::obtain(const nets::ModelSpec& spec, const train::TrainConfig& cfg) const {
  const auto path = path_for(spec, cfg);
  train::TrainState state;
  if (std::filesystem::exists(path)) {
    state = train::from_checkpoint(load_checkpoint(path));
    if (!(state.spec == spec)) throw ContractError(fmt::format("{}: stored model spec differs from the request", path.string()));
    if (!(state.config == cfg)) {
      throw ContractError(fmt::format("{}: stored training config differs from the request", path.string()));
    }
    if (state.step == cfg.steps) return {state.spec, std::move(state.params)};
    if (load_only_) throw ContractError(fmt::format("{}: training incomplete and store is load-only", path.string()));
  } else {
    if (load_only_) throw ContractError(fmt::format("missing checkpoint {}", path.string()));
    state = train::TrainState::fresh(spec, cfg);
  }
  if (!train_) throw ContractError("model store has no training data");
  std::filesystem::create_directories(dir_);
  train::train(state, *train_, [&](const train::TrainState& s) { save_checkpoint(path, train::to_checkpoint(s)); });
  save_checkpoint(path, train::to_checkpoint(state));
  return {state.spec, std::move(state.params)};
}

std::vector<train::LoadedModel> ModelStore::obtain_all(std::span<const nets::ModelSpec> specs,
                                                       const train::TrainConfig& cfg, std::size_t jobs) const {
  std::vector<train::LoadedModel> out(specs.size());
  parallel_for(specs.size(), jobs, [&](std::size_t i) { out[i] = obtain(specs[i], cfg); });
  return out;
}

namespace {

void check_context(const SweepContext& ctx) {
  if (!ctx.store) throw ContractError("sweep: no model store");
  if (ctx.tests.empty()) throw ContractError("sweep: no test sets");
  for (const auto& t : ctx.tests) {
    if (!t.data) throw ContractError("sweep: test set '" + t.name + "' has no data");
  }
}

struct Cell {
  std::string label;
  double x = 0.0;
  nets::ModelSpec spec;
};

std::vector<SweepRow> run_cells(const SweepContext& ctx, std::string_view experiment, const std::vector<Cell>& cells) {
  check_context(ctx);
  std::vector<nets::ModelSpec> specs;
  for (const auto& c : cells) {
    c.spec.validate();
    specs.push_back(c.spec);
  }
  const auto models = ctx.store->obtain_all(specs, ctx.train, ctx.jobs);
  std::vector<SweepRow> rows(cells.size() * ctx.tests.size());
  parallel_for(rows.size(), ctx.jobs, [&](std::size_t k) {
    const std::size_t c = k / ctx.tests.size(), t = k % ctx.tests.size();
    NetworkAcquirer acq(models[c].spec, models[c].params);
    EvalOptions opt = ctx.eval;
    opt.jobs = 1;
    rows[k] = {std::string(experiment), cells[c].label, cells[c].x, ctx.train.seed,
               evaluate(acq, *ctx.tests[t].data, ctx.tests[t].name, opt)};
  });
  return rows;
}

}  // namespace

std::vector<SweepRow> sweep_pilot_size(const SweepContext& ctx, std::span<const nets::Variant> models,
                                       std::span<const PilotSize> sizes) {
  std::vector<Cell> cells;
  for (const auto& sz : sizes) {
    for (auto v : models) {
      nets::ModelSpec s = ctx.base;
      s.variant = v;
      s.nt0 = sz.nt0;
      s.nc0 = sz.nc0;
      cells.push_back({fmt::format("{}x{}", sz.nt0, sz.nc0), static_cast<double>(sz.nt0 * sz.nc0), s});
    }
  }
  return run_cells(ctx, "pilot_size", cells);
}

std::vector<SweepRow> sweep_past_length(const SweepContext& ctx, std::span<const nets::Variant> models,
                                        std::span<const std::size_t> n_values) {
  std::vector<Cell> cells;
  for (auto n : n_values) {
    for (auto v : models) {
      nets::ModelSpec s = ctx.base;
      s.variant = v;
      s.n = n;
      cells.push_back({fmt::format("n{}", n), static_cast<double>(n), s});
    }
  }
  return run_cells(ctx, "past_length", cells);
}

std::vector<double> default_sigma_grid() { return {0.0, 0.02, 0.04, 0.08, 0.16, 0.32, 0.64, 1.28}; }

std::vector<SweepRow> sweep_disturbance(std::span<const Acquirer* const> models, std::span<const NamedTest> tests,
                                        std::span<const double> sigmas, const EvalOptions& base) {
  for (double s : sigmas) {
    if (!(s >= 0.0)) throw ContractError(fmt::format("sweep_disturbance: sigma {} is negative", s));
  }
  for (const auto* m : models) {
    if (!m) throw ContractError("sweep_disturbance: null model");
  }
  std::vector<SweepRow> rows;
  for (double s : sigmas) {
    for (const auto* m : models) {
      for (const auto& t : tests) {
        if (!t.data) throw ContractError("sweep_disturbance: test set '" + t.name + "' has no data");
        EvalOptions opt = base;
        opt.sigma = s;
        rows.push_back({fmt::format("disturbance_{}", to_string(base.mode)), fmt::format("sigma{}", cdlab::format_value(s)),
                        s, base.seed, evaluate(*m, *t.data, t.name, opt)});
      }
    }
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "experiment,cell,x,seed,model,test_set,samples,nmse,nmse_db,rho\n";
  for (const auto& r : rows) {
    const auto& e = r.report;
    out += fmt::format("{},{},{:.17g},{},{},{},{},{:.17g},{:.17g},{:.17g}\n", r.experiment, r.cell, r.x, r.seed, e.model,
                       e.test_set, e.samples, e.nmse, e.nmse_db, e.rho);
  }
  return out;
}

}  // namespace cdlab::eval
