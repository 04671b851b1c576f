// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cdlab::eval {

namespace {

void check_same(const CMatrix& a, const CMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

double nmse(const CMatrix& H, const CMatrix& Hhat) {
  check_same(H, Hhat, "nmse");
  double err = 0.0, ref = 0.0;
  const auto h = H.data();
  const auto g = Hhat.data();
  for (std::size_t k = 0; k < h.size(); ++k) {
    err += std::norm(h[k] - g[k]);
    ref += std::norm(h[k]);
  }
  if (!(ref > 0.0)) throw ContractError("nmse: true channel has zero norm");
  return err / ref;
}

double cosine_corr(const CMatrix& H, const CMatrix& Hhat) {
  check_same(H, Hhat, "cosine_corr");
  if (H.cols() == 0) throw ContractError("cosine_corr: no subcarriers");
  double total = 0.0;
  for (std::size_t m = 0; m < H.cols(); ++m) {
    cplx inner{};
    double nh = 0.0, ng = 0.0;
    for (std::size_t i = 0; i < H.rows(); ++i) {
      inner += std::conj(Hhat(i, m)) * H(i, m);
      nh += std::norm(H(i, m));
      ng += std::norm(Hhat(i, m));
    }
    if (!(nh > 0.0) || !(ng > 0.0)) throw ContractError("cosine_corr: zero-norm column " + std::to_string(m));
    total += std::min(1.0, std::abs(inner) / std::sqrt(nh * ng));
  }
  return total / static_cast<double>(H.cols());
}

CMatrix sample_matrix(const ComplexTensor& x, std::size_t b) {
  if (x.shape().size() != 3 || b >= x.shape()[0]) throw ContractError("sample_matrix: expected [B, rows, cols]");
  const std::size_t r = x.shape()[1], c = x.shape()[2];
  CMatrix out(r, c);
  auto d = out.data();
  for (std::size_t k = 0; k < r * c; ++k) d[k] = {x.re[b * r * c + k], x.im[b * r * c + k]};
  return out;
}

std::vector<double> nmse_batch(const ComplexTensor& H, const ComplexTensor& Hhat) {
  if (H.shape() != Hhat.shape()) throw ContractError("nmse_batch: shape mismatch");
  std::vector<double> out;
  for (std::size_t b = 0; b < H.shape().at(0); ++b) out.push_back(nmse(sample_matrix(H, b), sample_matrix(Hhat, b)));
  return out;
}

std::vector<double> cosine_corr_batch(const ComplexTensor& H, const ComplexTensor& Hhat) {
  if (H.shape() != Hhat.shape()) throw ContractError("cosine_corr_batch: shape mismatch");
  std::vector<double> out;
  for (std::size_t b = 0; b < H.shape().at(0); ++b) {
    out.push_back(cosine_corr(sample_matrix(H, b), sample_matrix(Hhat, b)));
  }
  return out;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

double mean(std::span<const double> values) {
  if (values.empty()) throw ContractError("mean: empty list");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::vector<double> values) {
  if (values.empty()) throw ContractError("median: empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<CdfPoint> error_cdf(std::span<const double> values) {
  if (values.empty()) throw ContractError("error_cdf: empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
    out.push_back({v[i], i + 1 == v.size() ? 1.0 : static_cast<double>(i + 1) / n});
  }
  return out;
}

}  // namespace cdlab::eval
