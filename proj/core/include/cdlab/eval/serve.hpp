// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cdlab/eval/evaluate.hpp"

namespace cdlab::eval {

enum class ServeMode { ideal_past, autoregressive };

std::string_view to_string(ServeMode m);
ServeMode parse_serve_mode(std::string_view text);
void parse_value(std::string_view text, ServeMode& out);
std::string format_value(ServeMode m);

struct ServeOptions {
  ServeMode mode = ServeMode::autoregressive;
  double sigma = 0.0;  // applied to stored window entries and, per `disturb`, the pilot
  DisturbMode disturb = DisturbMode::all_inputs;
  std::uint64_t seed = 0;
};

/// Where one window entry came from.
struct WindowEntry {
  std::int64_t slot = 0;
  bool deduced = false;

  friend bool operator==(const WindowEntry&, const WindowEntry&) = default;
};

struct ServeRow {
  std::int64_t slot = 0;
  double nmse = 0.0;
  double rho = 0.0;
  std::vector<WindowEntry> window;  // oldest first
};

struct ServeLog {
  std::string model;
  ServeMode mode = ServeMode::autoregressive;
  std::size_t n = 0;
  std::vector<ServeRow> rows;       // one per slot after the first n
  std::vector<CMatrix> acquired;    // model output per row
};

/// The first n slots are known exactly; every later slot is acquired from a
/// window of n earlier slots and the pilot entries of the true present channel.
/// Autoregressive mode fills the window with earlier outputs once they exist.
ServeLog serve_trajectory(const Acquirer& model, const sim::ChannelSequence& truth, const ServeOptions& opt = {});

/// Mobile trajectory of `length` slots through the test region, in the scene
/// a dataset generated from `root_seed` uses.
sim::ChannelSequence serving_trajectory(const sim::ScenarioConfig& cfg, std::uint64_t root_seed, std::size_t length,
                                        sim::Mobility kind = sim::Mobility::mobile);

/// slot,model,mode,nmse,nmse_db,rho,window; window lists `slot:truth|deduced`
/// entries separated by '|'.
std::string serve_csv(const ServeLog& log);

}  // namespace cdlab::eval
