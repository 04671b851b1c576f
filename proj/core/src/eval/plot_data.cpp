// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/eval/plot_data.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cdlab/config.hpp"

namespace cdlab::eval {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

double cell_value(std::string_view text) {
  if (text.empty()) return kMissing;
  double v = 0.0;
  cdlab::parse_value(text, v);
  return v;
}

}  // namespace

std::string PlotData::to_csv() const {
  if (values.size() != series.size()) throw ContractError("plot data: series/value count mismatch");
  std::string out = x_label;
  for (const auto& s : series) out += "," + s;
  out += '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += fmt::format("{:.17g}", x[i]);
    for (const auto& col : values) {
      if (col.size() != x.size()) throw ContractError("plot data: ragged series");
      out += std::isnan(col[i]) ? std::string(",") : fmt::format(",{:.17g}", col[i]);
    }
    out += '\n';
  }
  return out;
}

PlotData PlotData::from_csv(std::string_view text) {
  PlotData p;
  bool header = true;
  for (auto line : split(text, '\n')) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (header) {
      p.x_label = std::string(cells[0]);
      for (std::size_t k = 1; k < cells.size(); ++k) p.series.emplace_back(cells[k]);
      p.values.resize(p.series.size());
      header = false;
      continue;
    }
    if (cells.size() != p.series.size() + 1) throw ContractError("plot data: row has the wrong number of cells");
    p.x.push_back(cell_value(cells[0]));
    for (std::size_t k = 0; k < p.series.size(); ++k) p.values[k].push_back(cell_value(cells[k + 1]));
  }
  if (header) throw ContractError("plot data: missing header");
  return p;
}

PlotData plot_sweep(std::span<const SweepRow> rows, std::string_view x_label) {
  PlotData p;
  p.x_label = std::string(x_label);
  std::vector<std::string> names;
  std::map<std::pair<std::string, double>, double> cells;
  for (const auto& r : rows) {
    std::string name = r.report.model + "/" + r.report.test_set;
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
    if (std::find(p.x.begin(), p.x.end(), r.x) == p.x.end()) p.x.push_back(r.x);
    cells[{name, r.x}] = r.report.nmse_db;
  }
  std::sort(p.x.begin(), p.x.end());
  p.series = names;
  for (const auto& name : names) {
    std::vector<double> col;
    for (double x : p.x) {
      auto it = cells.find({name, x});
      col.push_back(it == cells.end() ? kMissing : it->second);
    }
    p.values.push_back(std::move(col));
  }
  return p;
}

PlotData plot_cdf(std::span<const EvalReport> reports) {
  PlotData p;
  p.x_label = "nmse";
  for (const auto& r : reports) {
    p.series.push_back(r.model + "/" + r.test_set);
    p.x.insert(p.x.end(), r.per_sample_nmse.begin(), r.per_sample_nmse.end());
  }
  std::sort(p.x.begin(), p.x.end());
  p.x.erase(std::unique(p.x.begin(), p.x.end()), p.x.end());
  for (const auto& r : reports) {
    std::vector<double> sorted = r.per_sample_nmse;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> col;
    for (double x : p.x) {
      const auto below = std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
      col.push_back(static_cast<double>(below) / static_cast<double>(sorted.size()));
    }
    p.values.push_back(std::move(col));
  }
  return p;
}

PlotData plot_serve(std::span<const ServeLog> logs) {
  PlotData p;
  p.x_label = "slot";
  std::map<std::int64_t, std::size_t> index;
  for (const auto& log : logs) {
    for (const auto& r : log.rows) index.emplace(r.slot, 0);
  }
  for (auto& [slot, i] : index) {
    i = p.x.size();
    p.x.push_back(static_cast<double>(slot));
  }
  for (const auto& log : logs) {
    p.series.push_back(log.model + "/" + std::string(to_string(log.mode)));
    std::vector<double> col(p.x.size(), kMissing);
    for (const auto& r : log.rows) col[index.at(r.slot)] = to_db(r.nmse);
    p.values.push_back(std::move(col));
  }
  return p;
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0] != "experiment,cell,x,seed,model,test_set,samples,nmse,nmse_db,rho") {
    throw ContractError("not a sweep report: unexpected header");
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto c = split(lines[i], ',');
    if (c.size() != 10) throw ContractError(fmt::format("sweep report line {}: expected 10 cells", i + 1));
    SweepRow r;
    r.experiment = std::string(c[0]);
    r.cell = std::string(c[1]);
    cdlab::parse_value(c[2], r.x);
    unsigned long long seed = 0, samples = 0;
    cdlab::parse_value(c[3], seed);
    r.seed = seed;
    r.report.model = std::string(c[4]);
    r.report.test_set = std::string(c[5]);
    cdlab::parse_value(c[6], samples);
    r.report.samples = samples;
    cdlab::parse_value(c[7], r.report.nmse);
    cdlab::parse_value(c[8], r.report.nmse_db);
    cdlab::parse_value(c[9], r.report.rho);
    rows.push_back(std::move(r));
  }
  return rows;
}

ServeLog parse_serve_csv(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0] != "slot,model,mode,nmse,nmse_db,rho,window") {
    throw ContractError("not a serve log: unexpected header");
  }
  ServeLog log;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto c = split(lines[i], ',');
    if (c.size() != 7) throw ContractError(fmt::format("serve log line {}: expected 7 cells", i + 1));
    ServeRow r;
    double slot = 0.0;
    cdlab::parse_value(c[0], slot);
    r.slot = static_cast<std::int64_t>(slot);
    log.model = std::string(c[1]);
    log.mode = parse_serve_mode(c[2]);
    cdlab::parse_value(c[3], r.nmse);
    cdlab::parse_value(c[5], r.rho);
    for (auto e : split(c[6], '|')) {
      if (e.empty()) continue;
      const auto colon = e.find(':');
      if (colon == std::string_view::npos) throw ContractError(fmt::format("serve log line {}: bad window entry", i + 1));
      double k = 0.0;
      cdlab::parse_value(e.substr(0, colon), k);
      const auto tag = e.substr(colon + 1);
      if (tag != "truth" && tag != "deduced") throw ContractError(fmt::format("serve log line {}: bad window tag", i + 1));
      r.window.push_back({static_cast<std::int64_t>(k), tag == "deduced"});
    }
    log.rows.push_back(std::move(r));
  }
  if (!log.rows.empty()) log.n = log.rows.front().window.size();
  return log;
}

std::string artifact_name(std::string_view experiment, std::string_view model, std::string_view cell,
                          std::uint64_t seed, std::string_view ext) {
  auto clean = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) {
      const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
      if (!ok) c = '-';
    }
    return out;
  };
  return fmt::format("{}__{}__{}__seed{}.{}", clean(experiment), clean(model), clean(cell), seed, clean(ext));
}

}  // namespace cdlab::eval
