// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <numbers>

#include "cdlab/eval/plot_data.hpp"
#include "cdlab/eval/serve.hpp"
#include "cdlab/eval/sweep.hpp"
#include "cdlab/rng.hpp"
#include "gradcheck.hpp"

namespace cdlab::eval {
namespace {

using nets::ModelSpec;
using nets::Variant;

CMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
  std::normal_distribution<double> g;
  CMatrix m(r, c);
  for (auto& v : m.data()) v = {g(rng), g(rng)};
  return m;
}

// Component-wise reference implementations.
double nmse_oracle(const CMatrix& H, const CMatrix& G) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < H.rows(); ++i)
    for (std::size_t j = 0; j < H.cols(); ++j) {
      const double dr = H(i, j).real() - G(i, j).real();
      const double di = H(i, j).imag() - G(i, j).imag();
      num += dr * dr + di * di;
      den += H(i, j).real() * H(i, j).real() + H(i, j).imag() * H(i, j).imag();
    }
  return num / den;
}

double rho_oracle(const CMatrix& H, const CMatrix& G) {
  double total = 0.0;
  for (std::size_t m = 0; m < H.cols(); ++m) {
    double ir = 0.0, ii = 0.0, nh = 0.0, ng = 0.0;
    for (std::size_t i = 0; i < H.rows(); ++i) {
      const double hr = H(i, m).real(), hi = H(i, m).imag();
      const double gr = G(i, m).real(), gi = G(i, m).imag();
      ir += gr * hr + gi * hi;
      ii += gr * hi - gi * hr;
      nh += hr * hr + hi * hi;
      ng += gr * gr + gi * gi;
    }
    total += std::hypot(ir, ii) / std::sqrt(nh) / std::sqrt(ng);
  }
  return total / static_cast<double>(H.cols());
}

TEST(Metrics, TrivialCases) {
  Rng rng(1);
  const CMatrix H = random_matrix(4, 6, rng);
  EXPECT_EQ(nmse(H, H), 0.0);
  EXPECT_EQ(nmse(H, CMatrix(4, 6)), 1.0);
  EXPECT_EQ(cosine_corr(H, H), 1.0);
  EXPECT_THROW(nmse(CMatrix(4, 6), H), ContractError);
  EXPECT_THROW(nmse(H, CMatrix(4, 5)), ContractError);
  EXPECT_THROW(cosine_corr(H, CMatrix(4, 6)), ContractError);
  CMatrix zero_col = H;
  for (std::size_t i = 0; i < 4; ++i) zero_col(i, 3) = 0.0;
  EXPECT_THROW(cosine_corr(zero_col, H), ContractError);
}

TEST(Metrics, MatchOraclesOnRandomPairs) {
  Rng rng(2);
  std::uniform_int_distribution<std::size_t> dim(1, 9);
  for (int k = 0; k < 100; ++k) {
    const std::size_t r = dim(rng), c = dim(rng);
    const CMatrix H = random_matrix(r, c, rng);
    const CMatrix G = random_matrix(r, c, rng);
    EXPECT_NEAR(nmse(H, G), nmse_oracle(H, G), 1e-12);
    const double rho = cosine_corr(H, G);
    EXPECT_NEAR(rho, rho_oracle(H, G), 1e-12);
    EXPECT_GE(rho, 0.0);
    EXPECT_LE(rho, 1.0);
  }
}

TEST(Metrics, CosineCorrIgnoresColumnPhase) {
  Rng rng(3);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int k = 0; k < 20; ++k) {
    const CMatrix H = random_matrix(5, 7, rng);
    const CMatrix G = random_matrix(5, 7, rng);
    CMatrix Hr = H, Gr = G, global = H;
    const cplx g = std::polar(1.0, angle(rng));
    for (std::size_t m = 0; m < 7; ++m) {
      const cplx a = std::polar(1.0, angle(rng)), b = std::polar(1.0, angle(rng));
      for (std::size_t i = 0; i < 5; ++i) {
        Hr(i, m) *= a;
        Gr(i, m) *= b;
        global(i, m) *= g;
      }
    }
    EXPECT_NEAR(cosine_corr(Hr, Gr), cosine_corr(H, G), 1e-13);
    EXPECT_NEAR(cosine_corr(H, global), 1.0, 1e-13);
  }
}

TEST(Metrics, BatchFormsAverageSamples) {
  Rng rng(4);
  ComplexTensor H({3, 2, 4}), G({3, 2, 4});
  for (std::size_t k = 0; k < H.re.size(); ++k) {
    H.re[k] = std::normal_distribution<double>()(rng);
    H.im[k] = std::normal_distribution<double>()(rng);
    G.re[k] = std::normal_distribution<double>()(rng);
    G.im[k] = std::normal_distribution<double>()(rng);
  }
  const auto e = nmse_batch(H, G);
  ASSERT_EQ(e.size(), 3u);
  for (std::size_t b = 0; b < 3; ++b) {
    EXPECT_EQ(e[b], nmse(sample_matrix(H, b), sample_matrix(G, b)));
    EXPECT_EQ(sample_matrix(H, b)(1, 2), cplx(H.re[b * 8 + 6], H.im[b * 8 + 6]));
  }
  EXPECT_EQ(mean(std::vector<double>{1.0, 2.0, 6.0}), 3.0);
  EXPECT_EQ(median({5.0, 1.0, 3.0}), 3.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_EQ(to_db(0.1), -10.0);
  EXPECT_THROW(mean({}), ContractError);
}

TEST(ErrorCdf, SmallCases) {
  EXPECT_EQ(error_cdf(std::vector<double>{0.4}), (std::vector<CdfPoint>{{0.4, 1.0}}));
  const auto c = error_cdf(std::vector<double>{0.3, 0.1, 0.1});
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].value, 0.1);
  EXPECT_EQ(c[0].fraction, 2.0 / 3.0);
  EXPECT_EQ(c[1], (CdfPoint{0.3, 1.0}));
  EXPECT_THROW(error_cdf({}), ContractError);
}

TEST(ErrorCdf, MatchesSortAndCount) {
  Rng rng(5);
  std::uniform_int_distribution<int> pick(0, 30);
  std::vector<double> v(200);
  for (auto& x : v) x = 0.01 * pick(rng);
  const auto cdf = error_cdf(v);
  EXPECT_EQ(cdf.back().fraction, 1.0);
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    const auto count = std::count_if(v.begin(), v.end(), [&](double x) { return x <= cdf[i].value; });
    EXPECT_DOUBLE_EQ(cdf[i].fraction, static_cast<double>(count) / 200.0);
    if (i) EXPECT_LT(cdf[i - 1].value, cdf[i].value);
  }
}

sim::ScenarioConfig toy_scenario() {
  sim::ScenarioConfig cfg;
  cfg.num_antennas = 4;
  cfg.num_subcarriers = 4;
  cfg.num_paths = 5;
  return cfg;
}

sim::GeneratedData toy_data(std::uint64_t seed) {
  sim::DatasetPlan plan;
  plan.train_count = 16;
  plan.train_length = 8;
  plan.test_mobile_count = 9;
  plan.test_static_count = 5;
  plan.test_length = 6;
  return sim::generate_datasets(toy_scenario(), plan, seed);
}

ModelSpec toy_spec(Variant v) {
  ModelSpec s;
  s.variant = v;
  s.nt = s.nc = 4;
  s.nt0 = s.nc0 = 2;
  s.n = 2;
  s.k1 = s.k2 = s.k3 = 1;
  s.width = 16;
  s.estimation_depth = 2;
  return s;
}

train::TrainConfig toy_train() {
  train::TrainConfig c;
  c.batch = 4;
  c.steps = 3;
  c.warmup = 2;
  c.seed = 9;
  return c;
}

TEST(EvalBatch, LastWindowAndDisturbanceModes) {
  const auto data = toy_data(1);
  const auto& test = data.test_mobile;
  const auto spec = toy_spec(Variant::rcdnet);
  EvalOptions clean;
  clean.seed = 4;
  const auto b0 = eval_batch(spec, test, 2, 3, clean);
  ASSERT_EQ(b0.past.shape(), (Shape{3, 2, 4, 4}));
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& s = test.sequences[2 + k];
    EXPECT_EQ(sample_matrix(b0.target, k), s[5]);
    EXPECT_EQ(b0.past.re[(k * 2 + 0) * 16 + 5], s[3](1, 1).real());
    EXPECT_EQ(b0.past.im[(k * 2 + 1) * 16 + 7], s[4](1, 3).imag());
  }

  EvalOptions loud = clean;
  loud.sigma = 0.3;
  EvalOptions past_only = loud;
  past_only.mode = DisturbMode::past_only;
  const auto b1 = eval_batch(spec, test, 2, 3, loud);
  const auto b2 = eval_batch(spec, test, 2, 3, past_only);
  EXPECT_EQ(b1.target, b0.target);
  EXPECT_EQ(b2.target, b0.target);
  EXPECT_NE(b1.pilot, b0.pilot);
  EXPECT_EQ(b2.pilot, b0.pilot);
  EXPECT_NE(b1.past, b0.past);
  EXPECT_EQ(b2.past, b1.past);
  EXPECT_EQ(eval_batch(spec, test, 2, 3, loud).past, b1.past);
  // Draws belong to (sequence, slot), not to the chunk a sample lands in.
  const auto single = eval_batch(spec, test, 3, 1, loud);
  for (std::size_t k = 0; k < 32; ++k) EXPECT_EQ(single.past.re[k], b1.past.re[32 + k]);

  ModelSpec too_long = spec;
  too_long.n = 6;
  EXPECT_THROW(eval_batch(too_long, test, 0, 1, clean), ContractError);
  EXPECT_THROW(eval_batch(spec, test, 8, 2, clean), ContractError);
}

TEST(Evaluate, TruthStubHasZeroError) {
  const auto data = toy_data(2);
  TruthAcquirer truth(toy_spec(Variant::rcdnet));
  EvalOptions opt;
  opt.chunk = 4;
  const auto r = evaluate(truth, data.test_mobile, "mobile", opt);
  EXPECT_EQ(r.model, "truth");
  EXPECT_EQ(r.samples, 9u);
  EXPECT_EQ(r.nmse, 0.0);
  EXPECT_EQ(r.rho, 1.0);
  EXPECT_TRUE(std::isinf(r.nmse_db));
  for (double e : r.per_sample_nmse) EXPECT_EQ(e, 0.0);
  EXPECT_NE(r.config_echo.find("test_set=mobile"), std::string::npos);
  const auto csv = reports_csv(std::vector<EvalReport>{r, r});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "model,test_set,samples,nmse,nmse_db,rho");
}

TEST(Evaluate, ChunkingAndJobsDoNotChangeResults) {
  const auto data = toy_data(3);
  const auto spec = toy_spec(Variant::acdnet);
  NetworkAcquirer net(spec, nets::init_params(spec, 3));
  EvalOptions a;
  a.sigma = 0.1;
  a.seed = 8;
  a.chunk = 2;
  EvalOptions b = a;
  b.jobs = 3;
  const auto ra = evaluate(net, data.test_mobile, "mobile", a);
  const auto rb = evaluate(net, data.test_mobile, "mobile", b);
  EXPECT_EQ(ra.per_sample_nmse, rb.per_sample_nmse);
  EXPECT_EQ(ra.per_sample_rho, rb.per_sample_rho);
  EXPECT_EQ(ra.nmse, rb.nmse);
  // Batch shape picks the matrix product kernel, so chunking may move last bits.
  EvalOptions c = a;
  c.chunk = 256;
  const auto rc = evaluate(net, data.test_mobile, "mobile", c);
  for (std::size_t k = 0; k < 9; ++k) {
    EXPECT_NEAR(rc.per_sample_nmse[k], ra.per_sample_nmse[k], 1e-12);
    EXPECT_NEAR(rc.per_sample_rho[k], ra.per_sample_rho[k], 1e-12);
  }
  EXPECT_GT(ra.nmse, 0.0);
  for (double r : ra.per_sample_rho) {
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("cdlab_eval_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::remove_all(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

TEST(Sweep, PilotSizeBookkeepingAndStore) {
  TempDir dir;
  const auto data = toy_data(4);
  ModelStore store(dir.path(), &data.train);
  SweepContext ctx{toy_spec(Variant::rcdnet), toy_train(), &store,
                   {{"mobile", &data.test_mobile}, {"static", &data.test_static}}, {}, 1};
  const std::vector<Variant> models{Variant::rcdnet, Variant::estimation};
  const std::vector<PilotSize> sizes{{1, 1}, {2, 2}, {4, 4}};
  const auto rows = sweep_pilot_size(ctx, models, sizes);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0].cell, "1x1");
  EXPECT_EQ(rows[0].report.model, "rcdnet");
  EXPECT_EQ(rows[1].report.test_set, "static");
  EXPECT_EQ(rows[2].report.model, "estimation");
  EXPECT_EQ(rows[11].cell, "4x4");
  EXPECT_EQ(rows[11].x, 16.0);
  EXPECT_EQ(std::distance(std::filesystem::directory_iterator(dir.path()), {}), 6);

  // Stored checkpoints are reused, so a load-only store reproduces every row.
  ModelStore reader(dir.path(), nullptr, true);
  ctx.store = &reader;
  const auto again = sweep_pilot_size(ctx, models, sizes);
  for (std::size_t k = 0; k < rows.size(); ++k) EXPECT_EQ(again[k].report.per_sample_nmse, rows[k].report.per_sample_nmse);
  EXPECT_EQ(sweep_csv(again), sweep_csv(rows));

  const std::vector<PilotSize> unseen{{4, 1}};
  EXPECT_THROW(sweep_pilot_size(ctx, models, unseen), ContractError);
  ctx.base.k1 = 2;
  EXPECT_THROW(sweep_pilot_size(ctx, models, sizes), ContractError);
}

TEST(Sweep, PastLengthBookkeeping) {
  TempDir dir;
  const auto data = toy_data(5);
  ModelStore store(dir.path(), &data.train);
  SweepContext ctx{toy_spec(Variant::rcdnet), toy_train(), &store, {{"mobile", &data.test_mobile}}, {}, 2};
  const std::vector<Variant> one{Variant::acdnet};
  EXPECT_EQ(sweep_past_length(ctx, one, std::vector<std::size_t>{1}).size(), 1u);
  const std::vector<Variant> two{Variant::acdnet, Variant::rcdnet};
  const auto rows = sweep_past_length(ctx, two, std::vector<std::size_t>{1, 3});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2].cell, "n3");
  EXPECT_EQ(rows[2].x, 3.0);
  EXPECT_EQ(rows[3].report.model, "rcdnet");
}

TEST(Sweep, DisturbanceZeroCellMatchesCleanRun) {
  const auto data = toy_data(6);
  const auto spec = toy_spec(Variant::rcdnet);
  NetworkAcquirer net(spec, nets::init_params(spec, 6));
  TruthAcquirer truth(spec);
  const std::vector<const Acquirer*> models{&net, &truth};
  const std::vector<NamedTest> tests{{"mobile", &data.test_mobile}};
  EvalOptions base;
  base.seed = 11;
  const auto grid = default_sigma_grid();
  ASSERT_EQ(grid.size(), 8u);
  EXPECT_EQ(grid.back(), 1.28);
  for (auto mode : {DisturbMode::all_inputs, DisturbMode::past_only}) {
    base.mode = mode;
    const auto rows = sweep_disturbance(models, tests, grid, base);
    ASSERT_EQ(rows.size(), 16u);
    const auto clean = evaluate(net, data.test_mobile, "mobile", base);
    EXPECT_EQ(rows[0].report.per_sample_nmse, clean.per_sample_nmse);
    EXPECT_EQ(rows[0].report.nmse, clean.nmse);
    EXPECT_EQ(rows[1].report.nmse, 0.0);
    // Truth stub ignores its inputs, so no sigma changes it.
    EXPECT_EQ(rows[15].report.nmse, 0.0);
    EXPECT_EQ(rows[14].cell, "sigma1.28");
    EXPECT_EQ(rows[14].experiment, std::string("disturbance_") + std::string(to_string(mode)));
  }
  EXPECT_THROW(sweep_disturbance(models, tests, std::vector<double>{-0.1}, base), ContractError);
}

// Records the past window of every call.
class RecordingAcquirer : public Acquirer {
 public:
  RecordingAcquirer(ModelSpec spec, ParameterSet params) : Acquirer(spec), net_(spec, std::move(params)) {}
  ComplexTensor acquire(const train::Batch& b) const override {
    std::lock_guard lock(mu_);
    seen.push_back(b);
    return net_.acquire(b);
  }
  mutable std::vector<train::Batch> seen;

 private:
  NetworkAcquirer net_;
  mutable std::mutex mu_;
};

CMatrix past_entry(const train::Batch& b, std::size_t k, std::size_t nt, std::size_t nc) {
  CMatrix m(nt, nc);
  for (std::size_t e = 0; e < nt * nc; ++e) m.data()[e] = {b.past.re[k * nt * nc + e], b.past.im[k * nt * nc + e]};
  return m;
}

TEST(Serve, TruthStubIsAFixedPoint) {
  const auto traj = serving_trajectory(toy_scenario(), 7, 30);
  ASSERT_EQ(traj.size(), 30u);
  TruthAcquirer truth(toy_spec(Variant::acdnet));
  for (auto mode : {ServeMode::ideal_past, ServeMode::autoregressive}) {
    const auto log = serve_trajectory(truth, traj, {mode});
    ASSERT_EQ(log.rows.size(), 28u);
    for (const auto& r : log.rows) {
      EXPECT_EQ(r.nmse, 0.0);
      EXPECT_EQ(r.rho, 1.0);
    }
  }
}

TEST(Serve, WindowAudit) {
  const auto traj = serving_trajectory(toy_scenario(), 8, 12);
  ModelSpec spec = toy_spec(Variant::rcdnet);
  spec.n = 3;
  for (auto mode : {ServeMode::ideal_past, ServeMode::autoregressive}) {
    RecordingAcquirer model(spec, nets::init_params(spec, 2));
    const auto log = serve_trajectory(model, traj, {mode});
    ASSERT_EQ(log.rows.size(), 9u);
    ASSERT_EQ(model.seen.size(), 9u);
    const auto omega = sim::PilotPattern::make(4, 4, 2, 2);
    for (std::size_t i = 0; i < 9; ++i) {
      const std::size_t t = i + 3;
      EXPECT_EQ(log.rows[i].slot, static_cast<std::int64_t>(t));
      ASSERT_EQ(log.rows[i].window.size(), 3u);
      EXPECT_EQ(sample_matrix(model.seen[i].pilot, 0), sim::extract_pilot(traj[t], omega));
      for (std::size_t j = 0; j < 3; ++j) {
        const std::size_t k = t - 3 + j;
        const bool deduced = mode == ServeMode::autoregressive && k >= 3;
        EXPECT_EQ(log.rows[i].window[j], (WindowEntry{static_cast<std::int64_t>(k), deduced}));
        const CMatrix expected = deduced ? log.acquired[k - 3] : traj[k];
        EXPECT_EQ(past_entry(model.seen[i], j, 4, 4), expected) << "slot " << t << " entry " << j;
      }
      EXPECT_DOUBLE_EQ(log.rows[i].nmse, nmse(traj[t], log.acquired[i]));
    }
    const auto csv = serve_csv(log);
    const auto back = parse_serve_csv(csv);
    EXPECT_EQ(back.mode, mode);
    EXPECT_EQ(back.n, 3u);
    ASSERT_EQ(back.rows.size(), 9u);
    EXPECT_EQ(back.rows[8].window, log.rows[8].window);
    EXPECT_EQ(back.rows[4].nmse, log.rows[4].nmse);
    EXPECT_EQ(plot_serve(std::vector<ServeLog>{back}).to_csv(), plot_serve(std::vector<ServeLog>{log}).to_csv());
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
    if (mode == ServeMode::autoregressive) EXPECT_NE(csv.find("3:deduced|4:deduced|5:deduced"), std::string::npos);
  }
}

TEST(Serve, DisturbanceTouchesWindowOnly) {
  const auto traj = serving_trajectory(toy_scenario(), 9, 10);
  const auto spec = toy_spec(Variant::rcdnet);
  RecordingAcquirer model(spec, nets::init_params(spec, 3));
  ServeOptions opt{ServeMode::ideal_past, 0.2, DisturbMode::past_only, 5};
  const auto log = serve_trajectory(model, traj, opt);
  const auto omega = sim::PilotPattern::make(4, 4, 2, 2);
  for (std::size_t i = 0; i < log.rows.size(); ++i) {
    EXPECT_EQ(sample_matrix(model.seen[i].pilot, 0), sim::extract_pilot(traj[i + 2], omega));
    EXPECT_NE(past_entry(model.seen[i], 0, 4, 4), traj[i]);
    EXPECT_EQ(log.rows[i].nmse, nmse(traj[i + 2], log.acquired[i]));
  }
  opt.disturb = DisturbMode::all_inputs;
  RecordingAcquirer model2(spec, nets::init_params(spec, 3));
  serve_trajectory(model2, traj, opt);
  EXPECT_NE(sample_matrix(model2.seen[0].pilot, 0), sim::extract_pilot(traj[2], omega));
  // The same window entry carries the same draw each time it is read.
  EXPECT_EQ(past_entry(model2.seen[0], 1, 4, 4), past_entry(model2.seen[1], 0, 4, 4));
}

TEST(Serve, RejectsBadInputs) {
  const auto traj = serving_trajectory(toy_scenario(), 10, 2);
  TruthAcquirer truth(toy_spec(Variant::rcdnet));
  EXPECT_THROW(serve_trajectory(truth, traj), ContractError);
  ModelSpec wide = toy_spec(Variant::rcdnet);
  wide.nt = 8;
  EXPECT_THROW(serve_trajectory(TruthAcquirer(wide), serving_trajectory(toy_scenario(), 10, 5)), ContractError);
  EXPECT_EQ(parse_serve_mode("ideal_past"), ServeMode::ideal_past);
  EXPECT_THROW(parse_serve_mode("ideal"), ContractError);
  EXPECT_EQ(serving_trajectory(toy_scenario(), 10, 6), serving_trajectory(toy_scenario(), 10, 6));
}

TEST(PlotData, CsvRoundTripAndLayouts) {
  PlotData p{"sigma", {0.0, 0.5}, {"a/mobile", "b/mobile"}, {{-3.0, -2.5}, {-1.0, std::nan("")}}};
  const auto text = p.to_csv();
  EXPECT_EQ(text, "sigma,a/mobile,b/mobile\n0,-3,-1\n0.5,-2.5,\n");
  const auto back = PlotData::from_csv(text);
  EXPECT_EQ(back.series, p.series);
  EXPECT_EQ(back.x, p.x);
  EXPECT_TRUE(std::isnan(back.values[1][1]));
  EXPECT_EQ(back.to_csv(), text);

  EvalReport r1, r2;
  r1.model = "rcdnet";
  r1.test_set = "mobile";
  r1.nmse_db = -6.0;
  r1.per_sample_nmse = {0.1, 0.3, 0.1};
  r2 = r1;
  r2.model = "acdnet";
  r2.per_sample_nmse = {0.2};
  const std::vector<SweepRow> rows{{"pilot_size", "1x1", 1.0, 1, r1}, {"pilot_size", "2x2", 4.0, 1, r1},
                                   {"pilot_size", "2x2", 4.0, 1, r2}};
  const auto sweep = plot_sweep(rows, "pilots");
  EXPECT_EQ(sweep.to_csv(), "pilots,rcdnet/mobile,acdnet/mobile\n1,-6,\n4,-6,-6\n");

  const auto cdf = plot_cdf(std::vector<EvalReport>{r1, r2});
  EXPECT_EQ(cdf.x, (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_EQ(cdf.values[0], (std::vector<double>{2.0 / 3.0, 2.0 / 3.0, 1.0}));
  EXPECT_EQ(cdf.values[1], (std::vector<double>{0.0, 1.0, 1.0}));

  const auto parsed = parse_sweep_csv(sweep_csv(rows));
  ASSERT_EQ(parsed.size(), 3u);
  EXPECT_EQ(parsed[2].report.model, "acdnet");
  EXPECT_EQ(parsed[1].x, 4.0);
  EXPECT_EQ(plot_sweep(parsed, "pilots").to_csv(), sweep.to_csv());
  EXPECT_THROW(parse_sweep_csv("slot,model\n"), ContractError);

  EXPECT_EQ(artifact_name("pilot_size", "rcdnet", "2x2", 3, "csv"), "pilot_size__rcdnet__2x2__seed3.csv");
  EXPECT_EQ(artifact_name("serve", "a/b c", "n=4", 1, "csv"), "serve__a-b-c__n-4__seed1.csv");
}

}  // namespace
}  // namespace cdlab::eval
