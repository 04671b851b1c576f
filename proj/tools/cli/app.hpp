// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cdlab/config.hpp"
#include "cdlab/eval/serve.hpp"
#include "cdlab/eval/sweep.hpp"

namespace cdlab::cli {

/// Bad command line, config, or missing inputs.
class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSection {
  std::uint64_t seed = 1;
  std::string data_dir;  // empty means <out>/data
  std::string tag;       // checkpoint stem; empty means the variant name

  template <class V>
  void visit(V& v) {
    v("seed", seed);
    v("data_dir", data_dir);
    v("tag", tag);
  }
};

struct EvalSection {
  std::string model;  // "truth", a checkpoint path, or empty for <out>/models/<tag>.ckpt
  double sigma = 0.0;
  eval::DisturbMode mode = eval::DisturbMode::all_inputs;
  std::size_t chunk = 256;

  template <class V>
  void visit(V& v) {
    v("model", model);
    v("sigma", sigma);
    v("mode", mode);
    v("chunk", chunk);
  }
};

struct SweepSection {
  std::string kind = "pilot_size";  // pilot_size | past_length | disturbance
  std::string models = "rcdnet,acdnet,estimation,prediction";
  std::string sizes = "1x1,2x2,4x4";
  std::string n_values = "1,2,4";
  std::string sigmas;  // empty means the default grid
  eval::DisturbMode mode = eval::DisturbMode::all_inputs;
  bool load_only = false;

  template <class V>
  void visit(V& v) {
    v("kind", kind);
    v("models", models);
    v("sizes", sizes);
    v("n_values", n_values);
    v("sigmas", sigmas);
    v("mode", mode);
    v("load_only", load_only);
  }
};

struct ServeSection {
  std::string model;  // as eval.model
  std::size_t length = 200;
  eval::ServeMode mode = eval::ServeMode::autoregressive;
  double sigma = 0.0;
  eval::DisturbMode disturb = eval::DisturbMode::all_inputs;
  sim::Mobility mobility = sim::Mobility::mobile;

  template <class V>
  void visit(V& v) {
    v("model", model);
    v("length", length);
    v("mode", mode);
    v("sigma", sigma);
    v("disturb", disturb);
    v("mobility", mobility);
  }
};

struct PlotSection {
  std::string input;
  std::string output;  // empty means the input name with .plot.csv
  std::string x_label = "x";

  template <class V>
  void visit(V& v) {
    v("input", input);
    v("output", output);
    v("x_label", x_label);
  }
};

/// Everything a subcommand needs, after merging the config file with
/// command-line overrides. Model dims default to the scenario's and the
/// training seed to the root seed.
struct RunConfig {
  std::string command;
  std::filesystem::path out;
  std::size_t jobs = 1;
  bool resume = false;

  RunSection run;
  sim::ScenarioConfig scenario;
  sim::DatasetPlan data;
  nets::ModelSpec model;
  train::TrainConfig train;
  EvalSection eval;
  SweepSection sweep;
  ServeSection serve;
  PlotSection plot;

  std::filesystem::path data_dir() const;
  std::filesystem::path models_dir() const { return out / "models"; }
  std::filesystem::path reports_dir() const { return out / "reports"; }
  std::string tag() const;

  /// Sorted key=value lines of every effective setting.
  std::string echo() const;
};

/// Keys are `seed`, `data_dir`, `tag`, and `<section>.<field>` for the
/// sections scenario, data, model, train, eval, sweep, serve, plot.
/// Throws CliError naming unknown keys or invalid values.
RunConfig make_run_config(std::string command, ConfigMap values, std::filesystem::path out, std::size_t jobs,
                          bool resume);

/// `--key value` or `--key=value` pairs.
ConfigMap parse_overrides(std::span<const std::string> args);

/// Flag, else $CDLAB_OUT, else ./cdlab_out.
std::filesystem::path resolve_out(const std::optional<std::string>& flag);

/// Files a command wrote, in write order.
struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::string summary;
};

CommandResult cmd_gen_data(const RunConfig& rc);
CommandResult cmd_train(const RunConfig& rc);
CommandResult cmd_eval(const RunConfig& rc);
CommandResult cmd_sweep(const RunConfig& rc);
CommandResult cmd_serve(const RunConfig& rc);
CommandResult cmd_plot_data(const RunConfig& rc);

/// Full entry point. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cdlab::cli
