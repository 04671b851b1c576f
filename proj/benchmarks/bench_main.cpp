// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include <benchmark/benchmark.h>

#include "cdlab/ops.hpp"
#include "cdlab/rng.hpp"
#include "cdlab/train/trainer.hpp"

namespace {

using namespace cdlab;
using ops::matmul;
using ops::sum;

Tensor random_tensor(const Shape& shape, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  Tensor t(shape);
  for (auto& v : t.data()) v = g(rng);
  return t;
}

nets::ModelSpec desk_spec(nets::Variant v, std::size_t n) {
  nets::ModelSpec s;
  s.variant = v;
  s.nt = s.nc = 8;
  s.nt0 = s.nc0 = 2;
  s.n = n;
  s.k1 = s.k2 = s.k3 = 2;
  s.width = 64;
  return s;
}

sim::Dataset desk_data() {
  sim::ScenarioConfig cfg;
  cfg.num_antennas = 8;
  cfg.num_subcarriers = 8;
  cfg.num_paths = 5;
  sim::DatasetPlan plan;
  plan.train_count = 64;
  plan.train_length = 32;
  plan.test_mobile_count = 1;
  plan.test_static_count = 1;
  return sim::generate_datasets(cfg, plan, 1).train;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = random_tensor({n, n}, 1), b = random_tensor({n, n}, 2);
  for (auto _ : state) {
    Tape tape(false);
    benchmark::DoNotOptimize(matmul(tape.constant(a), tape.constant(b)).value());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(128);

void BM_MatmulBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = random_tensor({n, n}, 1), b = random_tensor({n, n}, 2);
  for (auto _ : state) {
    Tape tape;
    Var x = tape.leaf(a), y = tape.leaf(b);
    tape.backward(sum(matmul(x, y)));
    benchmark::DoNotOptimize(tape.grad(x));
  }
}
BENCHMARK(BM_MatmulBackward)->Arg(32)->Arg(64)->Arg(128);

// Inference on a batch of 32 windows; counter reports the scalar-op cost model.
void BM_Forward(benchmark::State& state) {
  const auto variant = static_cast<nets::Variant>(state.range(0));
  const auto spec = desk_spec(variant, static_cast<std::size_t>(state.range(1)));
  const auto params = nets::init_params(spec, 1);
  const auto data = desk_data();
  train::TrainConfig cfg;
  cfg.batch = 32;
  const auto batch = train::assemble_batch(spec, train::sample_windows(data, spec, cfg, 1));
  for (auto _ : state) benchmark::DoNotOptimize(train::predict(spec, params, batch));
  state.SetLabel(std::string(nets::to_string(variant)));
  state.counters["cost_ops"] = static_cast<double>(nets::forward_cost(spec, params));
}
BENCHMARK(BM_Forward)
    ->ArgsProduct({{static_cast<int>(nets::Variant::rcdnet), static_cast<int>(nets::Variant::acdnet)}, {4, 8, 16}})
    ->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const auto variant = static_cast<nets::Variant>(state.range(0));
  const auto spec = desk_spec(variant, 4);
  const auto data = desk_data();
  train::TrainConfig cfg;
  cfg.warmup = 50;
  cfg.steps = 1u << 30;
  auto st = train::TrainState::fresh(spec, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(train::train_step(st, data));
  state.SetLabel(std::string(nets::to_string(variant)));
}
BENCHMARK(BM_TrainStep)
    ->DenseRange(static_cast<int>(nets::Variant::rcdnet), static_cast<int>(nets::Variant::prediction))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
