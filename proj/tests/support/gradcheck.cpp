// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdlab::testing {
namespace {

void update(GradCheckResult& r, double analytic, double numeric, double floor, const std::string& where) {
  const double abs_err = std::abs(analytic - numeric);
  const double rel = abs_err / std::max({std::abs(analytic), std::abs(numeric), floor});
  r.max_abs_error = std::max(r.max_abs_error, abs_err);
  if (r.checked == 0 || rel > r.max_rel_error) {
    r.max_rel_error = rel;
    r.worst = where;
  }
  ++r.checked;
}

}  // namespace

Tensor random_tensor(const Shape& shape, Rng& rng, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  Tensor t(shape);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

GradCheckResult check_gradients(const LossFn& fn, std::vector<Tensor> inputs, double h, double floor) {
  std::vector<Tensor> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const auto& t : inputs) vars.push_back(tape.leaf(t));
    Var loss = fn(tape, vars);
    tape.backward(loss);
    for (std::size_t k = 0; k < vars.size(); ++k) {
      const Tensor* g = tape.grad(vars[k]);
      analytic.push_back(g ? *g : Tensor(inputs[k].shape()));
    }
  }
  auto eval = [&](const std::vector<Tensor>& xs) {
    Tape tape(false);
    std::vector<Var> vars;
    for (const auto& t : xs) vars.push_back(tape.constant(t));
    return fn(tape, vars).value().item();
  };

  GradCheckResult r;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    for (std::size_t i = 0; i < inputs[k].size(); ++i) {
      const double x0 = inputs[k][i];
      inputs[k][i] = x0 + h;
      const double fp = eval(inputs);
      inputs[k][i] = x0 - h;
      const double fm = eval(inputs);
      inputs[k][i] = x0;
      update(r, analytic[k][i], (fp - fm) / (2.0 * h), floor,
             "input[" + std::to_string(k) + "][" + std::to_string(i) + "]");
    }
  }
  return r;
}

GradCheckResult check_param_gradients(const ParamLossFn& fn, ParameterSet& params, double h, double floor,
                                      std::size_t max_per_param, std::uint64_t seed) {
  params.zero_grad();
  {
    Tape tape;
    Var loss = fn(tape, params);
    tape.backward(loss);
  }
  auto eval = [&] {
    Tape tape(false);
    return fn(tape, params).value().item();
  };

  Rng rng(seed);
  GradCheckResult r;
  for (auto& p : params) {
    std::vector<std::size_t> idx(p.value.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (max_per_param != 0 && idx.size() > max_per_param) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(max_per_param);
    }
    for (std::size_t i : idx) {
      const double x0 = p.value[i];
      p.value[i] = x0 + h;
      const double fp = eval();
      p.value[i] = x0 - h;
      const double fm = eval();
      p.value[i] = x0;
      update(r, p.grad[i], (fp - fm) / (2.0 * h), floor, p.name + "[" + std::to_string(i) + "]");
    }
  }
  return r;
}

}  // namespace cdlab::testing
