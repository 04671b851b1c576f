// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cdlab/binary_io.hpp"
#include "cdlab/eval/plot_data.hpp"
#include "cli/app.hpp"

namespace cdlab::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kToyConfig = R"(# toy scale
seed = 3
scenario.num_antennas = 4
scenario.num_subcarriers = 4
scenario.num_paths = 5
data.train_count = 20
data.train_length = 8
data.test_mobile_count = 10
data.test_static_count = 6
data.test_length = 6
model.nt0 = 2
model.nc0 = 2
model.n = 2
model.k1 = 1
model.k2 = 1
model.k3 = 1
model.width = 16
model.estimation_depth = 2
train.batch = 4
train.steps = 6
train.warmup = 3
)";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() /
            (std::string("cdlab_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
    config_ = (root_ / "toy.cfg").string();
    write_file_atomic(config_, kToyConfig);
  }
  void TearDown() override { fs::remove_all(root_); }

  // Runs `cdlab <args...> -c toy.cfg`; returns the exit code.
  int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cdlab");
    args.push_back("-c");
    args.push_back(config_);
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir(const std::string& name) const { return root_ / name; }
  std::string out_text() const { return out_.str(); }
  std::string err_text() const { return err_.str(); }

  fs::path root_;
  std::string config_;
  std::ostringstream out_, err_;
};

std::size_t lines(const fs::path& p) {
  const auto t = read_file(p);
  return static_cast<std::size_t>(std::count(t.begin(), t.end(), '\n'));
}

TEST_F(CliTest, GenDataWritesFilesDeterministically) {
  ASSERT_EQ(cli({"gen-data", "-o", dir("a").string()}), 0) << err_text();
  ASSERT_EQ(cli({"gen-data", "-o", dir("b").string(), "--jobs", "2"}), 0) << err_text();
  for (const char* f : {"train.cds", "test_mobile.cds", "test_static.cds", "dataset_manifest.txt"}) {
    ASSERT_TRUE(fs::exists(dir("a") / "data" / f)) << f;
    EXPECT_EQ(read_file(dir("a") / "data" / f), read_file(dir("b") / "data" / f)) << f;
  }
  const auto train = sim::load_dataset(dir("a") / "data" / "train.cds");
  EXPECT_EQ(train.num_antennas, 4u);
  EXPECT_EQ(train.num_subcarriers, 4u);
  EXPECT_EQ(train.sequences.size(), 20u);
  const auto manifest = read_file(dir("a") / "data" / "dataset_manifest.txt");
  EXPECT_NE(manifest.find("seed=3"), std::string::npos);
  EXPECT_NE(manifest.find("test_x_min="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir("a") / "gen-data.config.txt"));
}

TEST_F(CliTest, RejectsBadConfigBeforeWriting) {
  EXPECT_EQ(cli({"gen-data", "-o", dir("x").string(), "--scenario.test_x_min", "50", "--scenario.test_x_max", "80"}),
            1);
  EXPECT_NE(err_text().find("overlap"), std::string::npos) << err_text();
  EXPECT_FALSE(fs::exists(dir("x")));
  EXPECT_EQ(cli({"gen-data", "-o", dir("x").string(), "--model.depth", "3"}), 1);
  EXPECT_NE(err_text().find("model.depth"), std::string::npos) << err_text();
  EXPECT_EQ(cli({"gen-data", "-o", dir("x").string(), "--data.train_count=abc"}), 1);
  EXPECT_EQ(cli({"gen-data", "-o", dir("x").string(), "--seed"}), 1);
  EXPECT_FALSE(fs::exists(dir("x")));
  EXPECT_NE(cli({"frobnicate"}), 0);
}

TEST_F(CliTest, TrainWritesCheckpointsAndResumesExactly) {
  const auto d = dir("run").string();
  ASSERT_EQ(cli({"gen-data", "-o", d}), 0) << err_text();
  EXPECT_EQ(cli({"train", "-o", dir("nodata").string()}), 1);
  EXPECT_NE(err_text().find("missing dataset"), std::string::npos);

  const auto data_dir = "--data_dir=" + (dir("run") / "data").string();
  ASSERT_EQ(cli({"train", "-o", dir("full").string(), data_dir, "--train.steps", "8"}), 0) << err_text();
  const auto full = dir("full") / "models";
  EXPECT_EQ(lines(full / "rcdnet.loss.csv"), 9u);
  const auto model = train::load_model(load_checkpoint(full / "rcdnet.ckpt"));
  EXPECT_EQ(model.spec.width, 16u);

  ASSERT_EQ(cli({"train", "-o", d, "--train.steps", "5", "--train.checkpoint_interval", "2"}), 0) << err_text();
  EXPECT_TRUE(fs::exists(dir("run") / "models" / "rcdnet.step4.ckpt"));
  fs::remove(dir("run") / "models" / "rcdnet.ckpt");
  ASSERT_EQ(cli({"train", "-o", d, "--resume", "--train.steps", "8", "--train.checkpoint_interval", "2"}), 0)
      << err_text();
  EXPECT_NE(out_text().find("resumed at 4"), std::string::npos) << out_text();
  EXPECT_EQ(read_file(dir("run") / "models" / "rcdnet.loss.csv"), read_file(full / "rcdnet.loss.csv"));
  const auto a = train::from_checkpoint(load_checkpoint(dir("run") / "models" / "rcdnet.ckpt"));
  const auto b = train::from_checkpoint(load_checkpoint(full / "rcdnet.ckpt"));
  EXPECT_EQ(a.trace, b.trace);
  for (const auto& p : a.params) EXPECT_EQ(p.value, b.params.at(p.name).value) << p.name;

  EXPECT_EQ(cli({"train", "-o", d, "--resume", "--train.steps", "8", "--train.batch", "5"}), 1);
  EXPECT_NE(err_text().find("differ"), std::string::npos) << err_text();
}

TEST_F(CliTest, EvalReportsAndErrors) {
  const auto d = dir("run").string();
  ASSERT_EQ(cli({"gen-data", "-o", d}), 0) << err_text();
  ASSERT_EQ(cli({"eval", "-o", d, "--eval.model", "truth"}), 0) << err_text();
  const auto rows = read_file(dir("run") / "reports" / "eval__truth__sigma0__seed3.csv");
  EXPECT_EQ(rows, "model,test_set,samples,nmse,nmse_db,rho\ntruth,mobile,10,0,-inf,1\ntruth,quasi_static,6,0,-inf,1\n");
  EXPECT_TRUE(fs::exists(dir("run") / "reports" / "error_cdf__truth__sigma0__seed3.plot.csv"));

  EXPECT_EQ(cli({"eval", "-o", d}), 1);
  EXPECT_NE(err_text().find("missing checkpoint"), std::string::npos) << err_text();
  EXPECT_EQ(cli({"eval", "-o", d, "--eval.model", "truth", "--model.nt", "8"}), 1);
  EXPECT_NE(err_text().find("8x4"), std::string::npos) << err_text();

  ASSERT_EQ(cli({"train", "-o", d}), 0) << err_text();
  ASSERT_EQ(cli({"eval", "-o", d, "--eval.sigma", "0.1", "--eval.mode", "past_only"}), 0) << err_text();
  EXPECT_EQ(lines(dir("run") / "reports" / "eval__rcdnet__sigma0.1__seed3.csv"), 3u);
  const auto echo = read_file(dir("run") / "eval.config.txt");
  EXPECT_NE(echo.find("eval.mode=past_only"), std::string::npos);
  // The echo is itself a valid config that reproduces the run settings.
  auto reparsed = make_run_config("eval", ConfigMap::parse(echo), dir("run"), 1, false);
  EXPECT_EQ(reparsed.echo(), echo.substr(echo.find('\n') + 1));
}

TEST_F(CliTest, SweepBookkeepingAndPlotData) {
  const auto d = dir("run").string();
  ASSERT_EQ(cli({"gen-data", "-o", d}), 0) << err_text();
  ASSERT_EQ(cli({"sweep", "-o", d, "--sweep.models", "rcdnet,estimation", "--sweep.sizes", "1x1,2x2,4x4"}), 0)
      << err_text();
  const auto csv = dir("run") / "reports" / "pilot_size__all__all__seed3.csv";
  EXPECT_EQ(lines(csv), 13u);
  const auto rows = eval::parse_sweep_csv(read_file(csv));
  EXPECT_EQ(rows.size(), 12u);

  const auto plot_out = (dir("run") / "pilot.plot.csv").string();
  ASSERT_EQ(cli({"plot-data", "-o", d, "--plot.input", csv.string(), "--plot.output", plot_out}), 0) << err_text();
  const auto plot = eval::PlotData::from_csv(read_file(plot_out));
  EXPECT_EQ(plot.x, (std::vector<double>{1.0, 4.0, 16.0}));
  EXPECT_EQ(plot.series.size(), 4u);

  ASSERT_EQ(cli({"sweep", "-o", d, "--sweep.kind", "past_length", "--sweep.models", "acdnet", "--sweep.n_values",
                 "1,3"}),
            0)
      << err_text();
  EXPECT_EQ(lines(dir("run") / "reports" / "past_length__all__all__seed3.csv"), 5u);

  ASSERT_EQ(cli({"sweep", "-o", d, "--sweep.kind", "disturbance", "--sweep.models", "rcdnet", "--sweep.sigmas",
                 "0,0.5"}),
            0)
      << err_text();
  const auto dist = eval::parse_sweep_csv(read_file(dir("run") / "reports" / "disturbance_all_inputs__all__all__seed3.csv"));
  ASSERT_EQ(dist.size(), 4u);

  EXPECT_EQ(cli({"sweep", "-o", d, "--sweep.kind", "nope"}), 1);
  EXPECT_EQ(cli({"sweep", "-o", dir("empty").string(), "--sweep.load_only", "true"}), 1);
  EXPECT_EQ(cli({"plot-data", "-o", d, "--plot.input", (dir("run") / "eval.config.txt").string()}), 1);
}

TEST_F(CliTest, ServeWritesOneRowPerDeducedSlot) {
  const auto d = dir("run").string();
  ASSERT_EQ(cli({"gen-data", "-o", d}), 0) << err_text();
  ASSERT_EQ(cli({"train", "-o", d}), 0) << err_text();
  ASSERT_EQ(cli({"serve", "-o", d, "--serve.length", "200"}), 0) << err_text();
  const auto csv = dir("run") / "reports" / "serve__rcdnet__autoregressive_mobile__seed3.csv";
  EXPECT_EQ(lines(csv), 199u);  // header + 200 - n
  const auto log = eval::parse_serve_csv(read_file(csv));
  EXPECT_EQ(log.rows.size(), 198u);
  EXPECT_TRUE(log.rows.back().window.back().deduced);

  ASSERT_EQ(cli({"serve", "-o", d, "--serve.model", "truth", "--serve.mode", "ideal_past"}), 0) << err_text();
  const auto truth = eval::parse_serve_csv(
      read_file(dir("run") / "reports" / "serve__truth__ideal_past_mobile__seed3.csv"));
  for (const auto& r : truth.rows) EXPECT_EQ(r.nmse, 0.0);
  EXPECT_EQ(cli({"serve", "-o", d, "--serve.length", "2"}), 1);
}

TEST_F(CliTest, OutputRootFromEnvironmentAndFlag) {
  const auto env_dir = dir("env");
  ::setenv("CDLAB_OUT", env_dir.c_str(), 1);
  EXPECT_EQ(resolve_out(std::nullopt), env_dir);
  EXPECT_EQ(resolve_out(std::string("flag")), fs::path("flag"));
  ASSERT_EQ(cli({"gen-data"}), 0) << err_text();
  EXPECT_TRUE(fs::exists(env_dir / "data" / "train.cds"));
  ::unsetenv("CDLAB_OUT");
  EXPECT_EQ(resolve_out(std::nullopt), fs::path("cdlab_out"));
}

TEST_F(CliTest, SameSeedGivesIdenticalReports) {
  for (const char* name : {"a", "b"}) {
    const auto d = dir(name).string();
    ASSERT_EQ(cli({"gen-data", "-o", d}), 0) << err_text();
    ASSERT_EQ(cli({"train", "-o", d}), 0) << err_text();
    ASSERT_EQ(cli({"eval", "-o", d, "--eval.sigma", "0.2"}), 0) << err_text();
  }
  for (const char* f : {"models/rcdnet.loss.csv", "models/rcdnet.ckpt", "reports/eval__rcdnet__sigma0.2__seed3.csv",
                        "eval.config.txt"}) {
    EXPECT_EQ(read_file(dir("a") / f), read_file(dir("b") / f)) << f;
  }
}

}  // namespace
}  // namespace cdlab::cli
