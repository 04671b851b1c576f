// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cdlab/eval/serve.hpp"
#include "cdlab/eval/sweep.hpp"

namespace cdlab::eval {

/// Column table: one x column and any number of named series. Missing cells
/// are written empty.
struct PlotData {
  std::string x_label;
  std::vector<double> x;
  std::vector<std::string> series;
  std::vector<std::vector<double>> values;  // [series][x]

  std::string to_csv() const;
  static PlotData from_csv(std::string_view text);
};

/// One series per model/test_set pair, x taken from the row, y = NMSE in dB.
PlotData plot_sweep(std::span<const SweepRow> rows, std::string_view x_label);

/// Error CDF per report on the union of all NMSE values: each series holds
/// the fraction of its samples at or below x.
PlotData plot_cdf(std::span<const EvalReport> reports);

/// Per-slot NMSE in dB, one series per log.
PlotData plot_serve(std::span<const ServeLog> logs);

/// Readers for sweep_csv and serve_csv output. Per-sample lists and the
/// acquired matrices are not stored in those files and come back empty.
std::vector<SweepRow> parse_sweep_csv(std::string_view text);
ServeLog parse_serve_csv(std::string_view text);

/// `<experiment>__<model>__<cell>__seed<seed>.<ext>` with unsafe characters
/// replaced by '-'.
std::string artifact_name(std::string_view experiment, std::string_view model, std::string_view cell,
                          std::uint64_t seed, std::string_view ext);

}  // namespace cdlab::eval
