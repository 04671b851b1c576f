// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cdlab/eval/metrics.hpp"
#include "cdlab/train/trainer.hpp"

namespace cdlab::eval {

/// Anything that maps a batch of inputs to present-channel estimates.
class Acquirer {
 public:
  explicit Acquirer(nets::ModelSpec spec) : spec_(std::move(spec)) {}
  virtual ~Acquirer() = default;

  const nets::ModelSpec& spec() const { return spec_; }
  virtual std::string name() const { return std::string(nets::to_string(spec_.variant)); }

  /// Returns [B, nt, nc]. Must be safe to call concurrently.
  virtual ComplexTensor acquire(const train::Batch& batch) const = 0;

 private:
  nets::ModelSpec spec_;
};

/// Trained network with frozen parameters.
class NetworkAcquirer : public Acquirer {
 public:
  NetworkAcquirer(nets::ModelSpec spec, ParameterSet params);
  explicit NetworkAcquirer(train::LoadedModel model) : NetworkAcquirer(model.spec, std::move(model.params)) {}

  ComplexTensor acquire(const train::Batch& batch) const override;
  const ParameterSet& params() const { return params_; }

 private:
  ParameterSet params_;
};

/// Test stub that returns the true present channel.
class TruthAcquirer : public Acquirer {
 public:
  using Acquirer::Acquirer;
  std::string name() const override { return "truth"; }
  ComplexTensor acquire(const train::Batch& batch) const override { return batch.target; }
};

enum class DisturbMode { all_inputs, past_only };

std::string_view to_string(DisturbMode m);
DisturbMode parse_disturb_mode(std::string_view text);
void parse_value(std::string_view text, DisturbMode& out);
std::string format_value(DisturbMode m);

struct EvalOptions {
  double sigma = 0.0;
  DisturbMode mode = DisturbMode::all_inputs;
  std::uint64_t seed = 0;
  std::size_t chunk = 256;
  std::size_t jobs = 1;
};

/// Inputs for test sequences [first, first + count): the last slot of each
/// sequence is the present one, the n slots before it the past window.
/// Disturbance factors depend only on (seed, sequence index, slot).
train::Batch eval_batch(const nets::ModelSpec& spec, const sim::Dataset& test, std::size_t first, std::size_t count,
                        const EvalOptions& opt);

struct EvalReport {
  std::string model;
  std::string test_set;
  std::size_t samples = 0;
  double nmse = 0.0;  // mean of per-sample ratios
  double nmse_db = 0.0;
  double rho = 0.0;
  std::vector<double> per_sample_nmse;
  std::vector<double> per_sample_rho;
  std::string config_echo;
};

/// Bit-identical for any `jobs`. The chunk size sets batch shapes, which can
/// change the last bits of products, so it belongs to the configuration.
EvalReport evaluate(const Acquirer& model, const sim::Dataset& test, std::string_view test_set,
                    const EvalOptions& opt = {});

/// Header plus one row per report.
std::string reports_csv(std::span<const EvalReport> reports);

}  // namespace cdlab::eval
