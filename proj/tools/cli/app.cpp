// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "app.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <memory>
#include <ostream>

#include "cdlab/binary_io.hpp"
#include "cdlab/eval/plot_data.hpp"
#include "cdlab/rng.hpp"

namespace cdlab::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    std::string item(text.substr(start, end - start));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
    start = end + 1;
  }
  return out;
}

template <class T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) {
    T v{};
    try {
      parse_value(item, v);
    } catch (const std::exception& e) {
      throw CliError(fmt::format("{}: bad entry '{}' ({})", key, item, e.what()));
    }
    out.push_back(v);
  }
  if (out.empty()) throw CliError(fmt::format("{}: empty list", key));
  return out;
}

std::vector<nets::Variant> parse_variants(std::string_view text) {
  std::vector<nets::Variant> out;
  for (const auto& item : split_list(text)) {
    try {
      out.push_back(nets::parse_variant(item));
    } catch (const std::exception& e) {
      throw CliError(fmt::format("sweep.models: {}", e.what()));
    }
  }
  if (out.empty()) throw CliError("sweep.models: empty list");
  return out;
}

std::vector<eval::PilotSize> parse_sizes(std::string_view text) {
  std::vector<eval::PilotSize> out;
  for (const auto& item : split_list(text)) {
    const auto x = item.find('x');
    if (x == std::string::npos) throw CliError(fmt::format("sweep.sizes: '{}' is not of the form AxB", item));
    eval::PilotSize s;
    unsigned long a = 0, b = 0;
    try {
      parse_value(std::string_view(item).substr(0, x), a);
      parse_value(std::string_view(item).substr(x + 1), b);
    } catch (const std::exception& e) {
      throw CliError(fmt::format("sweep.sizes: bad entry '{}' ({})", item, e.what()));
    }
    s.nt0 = a;
    s.nc0 = b;
    out.push_back(s);
  }
  if (out.empty()) throw CliError("sweep.sizes: empty list");
  return out;
}

void write_echo(const RunConfig& rc, const std::string& name) {
  fs::create_directories(rc.out);
  write_file_atomic(rc.out / (name + ".config.txt"), "# cdlab " + rc.command + "\n" + rc.echo());
}

void check_dims(const nets::ModelSpec& spec, const sim::Dataset& ds, std::string_view what) {
  if (spec.nt != ds.num_antennas || spec.nc != ds.num_subcarriers) {
    throw CliError(fmt::format("model expects {}x{} channels but {} holds {}x{}", spec.nt, spec.nc, what,
                               ds.num_antennas, ds.num_subcarriers));
  }
}

sim::Dataset load_split(const fs::path& path) {
  if (!fs::exists(path)) throw CliError(fmt::format("missing dataset file {} (run gen-data first)", path.string()));
  return sim::load_dataset(path);
}

std::unique_ptr<eval::Acquirer> make_acquirer(const RunConfig& rc, const std::string& source) {
  if (source == "truth") return std::make_unique<eval::TruthAcquirer>(rc.model);
  const fs::path path = source.empty() ? rc.models_dir() / (rc.tag() + ".ckpt") : fs::path(source);
  if (!fs::exists(path)) throw CliError(fmt::format("missing checkpoint {}", path.string()));
  return std::make_unique<eval::NetworkAcquirer>(train::load_model(load_checkpoint(path)));
}

std::size_t count_lines(const fs::path& path) {
  const std::string text = read_file(path);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

void expect_lines(const fs::path& path, std::size_t lines) {
  const std::size_t got = count_lines(path);
  if (got != lines) throw CliError(fmt::format("{}: wrote {} lines, expected {}", path.string(), got, lines));
}

struct Resumable {
  fs::path path;
  std::uint64_t step = 0;
};

// Latest checkpoint for `tag` that does not pass `limit` steps.
std::optional<Resumable> find_resume_point(const fs::path& dir, const std::string& tag, std::uint64_t limit) {
  std::optional<Resumable> best;
  if (!fs::exists(dir)) return best;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!name.starts_with(tag + ".") || !name.ends_with(".ckpt")) continue;
    const std::string middle = name.substr(tag.size() + 1, name.size() - tag.size() - 6);
    if (!middle.empty() && !middle.starts_with("step")) continue;
    const auto state = train::from_checkpoint(load_checkpoint(entry.path()));
    if (state.step > limit) continue;
    if (!best || state.step > best->step) best = Resumable{entry.path(), state.step};
  }
  return best;
}

}  // namespace

fs::path RunConfig::data_dir() const { return run.data_dir.empty() ? out / "data" : fs::path(run.data_dir); }

std::string RunConfig::tag() const { return run.tag.empty() ? std::string(nets::to_string(model.variant)) : run.tag; }

std::string RunConfig::echo() const {
  ConfigMap m;
  write_config(m, run);
  write_prefixed(m, "scenario.", scenario);
  write_prefixed(m, "data.", data);
  write_prefixed(m, "model.", model);
  write_prefixed(m, "train.", train);
  write_prefixed(m, "eval.", eval);
  write_prefixed(m, "sweep.", sweep);
  write_prefixed(m, "serve.", serve);
  write_prefixed(m, "plot.", plot);
  return m.to_text();
}

RunConfig make_run_config(std::string command, ConfigMap values, fs::path out, std::size_t jobs, bool resume) {
  RunConfig rc;
  rc.command = std::move(command);
  rc.out = std::move(out);
  rc.jobs = jobs;
  rc.resume = resume;
  const bool has_nt = values.has("model.nt"), has_nc = values.has("model.nc");
  const bool has_train_seed = values.has("train.seed");
  try {
    read_config(values, rc.run);
    read_prefixed(values, "scenario.", rc.scenario);
    read_prefixed(values, "data.", rc.data);
    read_prefixed(values, "model.", rc.model);
    read_prefixed(values, "train.", rc.train);
    read_prefixed(values, "eval.", rc.eval);
    read_prefixed(values, "sweep.", rc.sweep);
    read_prefixed(values, "serve.", rc.serve);
    read_prefixed(values, "plot.", rc.plot);
    values.reject_unconsumed();
    if (!has_nt) rc.model.nt = rc.scenario.antenna_count();
    if (!has_nc) rc.model.nc = rc.scenario.num_subcarriers;
    if (!has_train_seed) rc.train.seed = rc.run.seed;
    rc.scenario.validate();
    rc.data.validate();
    rc.model.validate();
    rc.train.validate();
  } catch (const ContractError& e) {
    throw CliError(e.what());
  }
  if (rc.eval.chunk == 0) throw CliError("eval.chunk must be positive");
  return rc;
}

ConfigMap parse_overrides(std::span<const std::string> args) {
  ConfigMap m;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (!a.starts_with("--") || a.size() == 2) throw CliError(fmt::format("unexpected argument '{}'", a));
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      m.set(a.substr(2, eq - 2), a.substr(eq + 1));
      continue;
    }
    if (i + 1 >= args.size()) throw CliError(fmt::format("override {} has no value", a));
    m.set(a.substr(2), args[++i]);
  }
  return m;
}

fs::path resolve_out(const std::optional<std::string>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CDLAB_OUT"); env && *env) return env;
  return "cdlab_out";
}

CommandResult cmd_gen_data(const RunConfig& rc) {
  write_echo(rc, "gen-data");
  const auto files = sim::build_dataset(rc.scenario, rc.data, rc.run.seed, rc.data_dir(), rc.jobs);
  const std::pair<fs::path, std::size_t> splits[] = {{files.train, rc.data.train_count},
                                                     {files.test_mobile, rc.data.test_mobile_count},
                                                     {files.test_static, rc.data.test_static_count}};
  for (const auto& [path, count] : splits) {
    const auto ds = sim::load_dataset(path);
    if (ds.sequences.size() != count || ds.num_antennas != rc.scenario.antenna_count() ||
        ds.num_subcarriers != rc.scenario.num_subcarriers) {
      throw CliError(fmt::format("{}: contents do not match the config", path.string()));
    }
  }
  return {{files.train, files.test_mobile, files.test_static, files.manifest},
          fmt::format("datasets in {}\n", rc.data_dir().string())};
}

CommandResult cmd_train(const RunConfig& rc) {
  const auto data = load_split(sim::DatasetFiles::in(rc.data_dir()).train);
  check_dims(rc.model, data, "the training set");
  write_echo(rc, "train");
  const fs::path dir = rc.models_dir();
  const std::string tag = rc.tag();
  fs::create_directories(dir);

  train::TrainState state;
  const auto resume_from = rc.resume ? find_resume_point(dir, tag, rc.train.steps) : std::nullopt;
  if (resume_from) {
    state = train::from_checkpoint(load_checkpoint(resume_from->path));
    train::TrainConfig stored = state.config;
    stored.steps = rc.train.steps;
    if (!(state.spec == rc.model) || !(stored == rc.train)) {
      throw CliError(fmt::format("{}: checkpoint settings differ from the config", resume_from->path.string()));
    }
    state.config.steps = rc.train.steps;
  } else {
    state = train::TrainState::fresh(rc.model, rc.train);
  }

  CommandResult res;
  train::train(state, data, [&](const train::TrainState& s) {
    const fs::path p = dir / fmt::format("{}.step{}.ckpt", tag, s.step);
    save_checkpoint(p, train::to_checkpoint(s));
    res.files.push_back(p);
  });
  const fs::path final_path = dir / (tag + ".ckpt");
  const fs::path loss_path = dir / (tag + ".loss.csv");
  save_checkpoint(final_path, train::to_checkpoint(state));
  write_file_atomic(loss_path, train::loss_csv(state.trace));
  res.files.push_back(final_path);
  res.files.push_back(loss_path);

  const auto reloaded = train::from_checkpoint(load_checkpoint(final_path));
  if (reloaded.step != rc.train.steps || reloaded.trace.size() != rc.train.steps) {
    throw CliError(fmt::format("{}: stored state is incomplete", final_path.string()));
  }
  expect_lines(loss_path, rc.train.steps + 1);
  res.summary = fmt::format("{}: {} steps{}, final loss {:.6g}\n", tag, state.step,
                            resume_from ? fmt::format(" (resumed at {})", resume_from->step) : std::string(),
                            state.trace.empty() ? 0.0 : state.trace.back().loss);
  return res;
}

namespace {

struct TestSets {
  sim::Dataset mobile;
  sim::Dataset quasi_static;
};

TestSets load_tests(const RunConfig& rc, const nets::ModelSpec& spec) {
  const auto files = sim::DatasetFiles::in(rc.data_dir());
  TestSets t{load_split(files.test_mobile), load_split(files.test_static)};
  check_dims(spec, t.mobile, "the mobile test set");
  check_dims(spec, t.quasi_static, "the quasi-static test set");
  return t;
}

eval::EvalOptions eval_options(const RunConfig& rc) {
  eval::EvalOptions opt;
  opt.sigma = rc.eval.sigma;
  opt.mode = rc.eval.mode;
  opt.seed = derive_seed(rc.run.seed, "eval");
  opt.chunk = rc.eval.chunk;
  opt.jobs = rc.jobs;
  return opt;
}

}  // namespace

CommandResult cmd_eval(const RunConfig& rc) {
  const auto model = make_acquirer(rc, rc.eval.model);
  const auto tests = load_tests(rc, model->spec());
  if (!(rc.eval.sigma >= 0.0)) throw CliError("eval.sigma must be nonnegative");
  write_echo(rc, "eval");
  const auto opt = eval_options(rc);
  const std::vector<eval::EvalReport> reports{eval::evaluate(*model, tests.mobile, "mobile", opt),
                                              eval::evaluate(*model, tests.quasi_static, "quasi_static", opt)};
  const std::string cell = "sigma" + cdlab::format_value(rc.eval.sigma);
  const fs::path dir = rc.reports_dir();
  const fs::path csv = dir / eval::artifact_name("eval", model->name(), cell, rc.run.seed, "csv");
  const fs::path cdf = dir / eval::artifact_name("error_cdf", model->name(), cell, rc.run.seed, "plot.csv");
  write_file_atomic(csv, eval::reports_csv(reports));
  write_file_atomic(cdf, eval::plot_cdf(reports).to_csv());
  expect_lines(csv, 3);
  std::string summary;
  for (const auto& r : reports) {
    summary += fmt::format("{} on {}: NMSE {:.4g} ({:.2f} dB), rho {:.4f}\n", r.model, r.test_set, r.nmse, r.nmse_db,
                           r.rho);
  }
  return {{csv, cdf}, summary};
}

CommandResult cmd_sweep(const RunConfig& rc) {
  const auto& sw = rc.sweep;
  const auto variants = parse_variants(sw.models);
  const auto files = sim::DatasetFiles::in(rc.data_dir());
  const auto tests = load_tests(rc, rc.model);
  std::optional<sim::Dataset> train_data;
  if (!sw.load_only) {
    train_data = load_split(files.train);
    check_dims(rc.model, *train_data, "the training set");
  }
  const eval::ModelStore store(rc.models_dir() / "sweep", train_data ? &*train_data : nullptr, sw.load_only);
  eval::SweepContext ctx{rc.model, rc.train, &store,
                         {{"mobile", &tests.mobile}, {"quasi_static", &tests.quasi_static}}, eval_options(rc), rc.jobs};

  std::vector<eval::SweepRow> rows;
  std::string x_label;
  if (sw.kind == "pilot_size") {
    const auto sizes = parse_sizes(sw.sizes);
    write_echo(rc, "sweep_" + sw.kind);
    rows = eval::sweep_pilot_size(ctx, variants, sizes);
    x_label = "pilot_entries";
  } else if (sw.kind == "past_length") {
    const auto ns = parse_list<unsigned long>("sweep.n_values", sw.n_values);
    write_echo(rc, "sweep_" + sw.kind);
    rows = eval::sweep_past_length(ctx, variants, std::vector<std::size_t>(ns.begin(), ns.end()));
    x_label = "n";
  } else if (sw.kind == "disturbance") {
    const auto sigmas = sw.sigmas.empty() ? eval::default_sigma_grid() : parse_list<double>("sweep.sigmas", sw.sigmas);
    write_echo(rc, "sweep_" + sw.kind);
    std::vector<nets::ModelSpec> specs;
    for (auto v : variants) {
      specs.push_back(rc.model);
      specs.back().variant = v;
    }
    const auto models = store.obtain_all(specs, rc.train, rc.jobs);
    std::vector<std::unique_ptr<eval::Acquirer>> owned;
    std::vector<const eval::Acquirer*> ptrs;
    for (const auto& m : models) {
      owned.push_back(std::make_unique<eval::NetworkAcquirer>(m.spec, m.params));
      ptrs.push_back(owned.back().get());
    }
    auto opt = eval_options(rc);
    opt.mode = sw.mode;
    rows = eval::sweep_disturbance(ptrs, ctx.tests, sigmas, opt);
    x_label = "sigma";
  } else {
    throw CliError(fmt::format("sweep.kind must be pilot_size, past_length or disturbance, got '{}'", sw.kind));
  }

  const std::string experiment = rows.empty() ? sw.kind : rows.front().experiment;
  const fs::path dir = rc.reports_dir();
  const fs::path csv = dir / eval::artifact_name(experiment, "all", "all", rc.run.seed, "csv");
  const fs::path plot = dir / eval::artifact_name(experiment, "all", "all", rc.run.seed, "plot.csv");
  write_file_atomic(csv, eval::sweep_csv(rows));
  write_file_atomic(plot, eval::plot_sweep(rows, x_label).to_csv());
  expect_lines(csv, rows.size() + 1);
  std::string summary;
  for (const auto& r : rows) {
    summary += fmt::format("{} {} {} {}: {:.2f} dB, rho {:.4f}\n", r.experiment, r.cell, r.report.model,
                           r.report.test_set, r.report.nmse_db, r.report.rho);
  }
  return {{csv, plot}, summary};
}

CommandResult cmd_serve(const RunConfig& rc) {
  const auto& sv = rc.serve;
  const auto model = make_acquirer(rc, sv.model);
  const auto& spec = model->spec();
  if (spec.nt != rc.scenario.antenna_count() || spec.nc != rc.scenario.num_subcarriers) {
    throw CliError(fmt::format("model expects {}x{} channels but the scenario gives {}x{}", spec.nt, spec.nc,
                               rc.scenario.antenna_count(), rc.scenario.num_subcarriers));
  }
  if (sv.length <= spec.n) throw CliError(fmt::format("serve.length must exceed n = {}", spec.n));
  write_echo(rc, "serve");
  const auto truth = eval::serving_trajectory(rc.scenario, rc.run.seed, sv.length, sv.mobility);
  const eval::ServeOptions opt{sv.mode, sv.sigma, sv.disturb, derive_seed(rc.run.seed, "serve_disturbance")};
  const auto log = eval::serve_trajectory(*model, truth, opt);

  const std::string cell = std::string(eval::to_string(sv.mode)) + "_" + std::string(sim::to_string(sv.mobility));
  const fs::path dir = rc.reports_dir();
  const fs::path csv = dir / eval::artifact_name("serve", model->name(), cell, rc.run.seed, "csv");
  const fs::path plot = dir / eval::artifact_name("serve", model->name(), cell, rc.run.seed, "plot.csv");
  write_file_atomic(csv, eval::serve_csv(log));
  write_file_atomic(plot, eval::plot_serve(std::vector<eval::ServeLog>{log}).to_csv());
  expect_lines(csv, sv.length - spec.n + 1);

  std::vector<double> e;
  for (const auto& r : log.rows) e.push_back(r.nmse);
  const std::size_t q = std::min<std::size_t>(50, e.size());
  const double first = eval::median(std::vector<double>(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(q)));
  const double last = eval::median(std::vector<double>(e.end() - static_cast<std::ptrdiff_t>(q), e.end()));
  return {{csv, plot},
          fmt::format("{} {} over {} slots: median NMSE first {} {:.4g}, last {} {:.4g}\n", log.model,
                      eval::to_string(log.mode), log.rows.size(), q, first, q, last)};
}

CommandResult cmd_plot_data(const RunConfig& rc) {
  if (rc.plot.input.empty()) throw CliError("plot.input is required");
  const fs::path input = rc.plot.input;
  if (!fs::exists(input)) throw CliError(fmt::format("missing input {}", input.string()));
  const std::string text = read_file(input);
  eval::PlotData plot;
  try {
    if (text.starts_with("experiment,cell,")) {
      plot = eval::plot_sweep(eval::parse_sweep_csv(text), rc.plot.x_label);
    } else if (text.starts_with("slot,model,")) {
      plot = eval::plot_serve(std::vector<eval::ServeLog>{eval::parse_serve_csv(text)});
    } else {
      throw CliError(fmt::format("{}: not a sweep report or serve log", input.string()));
    }
  } catch (const ContractError& e) {
    throw CliError(fmt::format("{}: {}", input.string(), e.what()));
  }
  fs::path output = rc.plot.output;
  if (output.empty()) {
    output = input;
    output.replace_extension(".plot.csv");
  }
  write_echo(rc, "plot-data");
  write_file_atomic(output, plot.to_csv());
  expect_lines(output, plot.x.size() + 1);
  return {{output}, fmt::format("{} series over {} points\n", plot.series.size(), plot.x.size())};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cdlab: channel deduction lab"};
  app.require_subcommand(1, 1);
  std::vector<std::string> configs;
  std::optional<std::string> out_dir;
  std::size_t jobs = 1;
  bool resume = false;

  const std::pair<const char*, const char*> commands[] = {
      {"gen-data", "Generate train and test channel datasets"},
      {"train", "Train one model on the training set"},
      {"eval", "Evaluate a checkpoint or the truth stub on both test sets"},
      {"sweep", "Pilot size, past length or disturbance sweep"},
      {"serve", "Serve one trajectory slot by slot"},
      {"plot-data", "Turn a sweep report or serve log into plot columns"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->allow_extras();
    sub->footer("Any other setting is passed as --key value, e.g. --model.width 64 --train.steps 500.");
    sub->add_option("-c,--config", configs, "key=value config file (later files win)")->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output root (default $CDLAB_OUT or ./cdlab_out)");
    sub->add_option("-j,--jobs", jobs, "parallel workers, 0 for all cores")->capture_default_str();
    if (std::string_view(name) == "train") sub->add_flag("--resume", resume, "continue from the latest checkpoint");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    ConfigMap values;
    for (const auto& path : configs) values.merge(ConfigMap::parse(read_file(path), path));
    const auto extras = sub->remaining();
    values.merge(parse_overrides(extras));
    const RunConfig rc = make_run_config(command, std::move(values), resolve_out(out_dir), jobs, resume);
    CommandResult res;
    if (command == "gen-data") res = cmd_gen_data(rc);
    else if (command == "train") res = cmd_train(rc);
    else if (command == "eval") res = cmd_eval(rc);
    else if (command == "sweep") res = cmd_sweep(rc);
    else if (command == "serve") res = cmd_serve(rc);
    else res = cmd_plot_data(rc);
    for (const auto& f : res.files) out << "wrote " << f.string() << '\n';
    out << res.summary;
    return 0;
  } catch (const std::exception& e) {
    err << "cdlab " << command << ": error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cdlab::cli
