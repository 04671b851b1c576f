// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <span>
#include <vector>

#include "cdlab/cmatrix.hpp"
#include "cdlab/complex_ops.hpp"

namespace cdlab::eval {

/// ||H - Hhat||^2 / ||H||^2; throws on a zero-norm H.
double nmse(const CMatrix& H, const CMatrix& Hhat);
/// Mean over subcarriers (columns) of |hhat_m^H h_m| / (||hhat_m|| ||h_m||).
double cosine_corr(const CMatrix& H, const CMatrix& Hhat);

/// Per-sample values for [B, nt, nc] batches.
std::vector<double> nmse_batch(const ComplexTensor& H, const ComplexTensor& Hhat);
std::vector<double> cosine_corr_batch(const ComplexTensor& H, const ComplexTensor& Hhat);

/// Sample b of a [B, rows, cols] complex tensor.
CMatrix sample_matrix(const ComplexTensor& x, std::size_t b);

double to_db(double linear);
double mean(std::span<const double> values);
double median(std::vector<double> values);

struct CdfPoint {
  double value = 0.0;
  double fraction = 0.0;

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

/// Empirical CDF with one point per distinct value.
std::vector<CdfPoint> error_cdf(std::span<const double> values);

}  // namespace cdlab::eval
