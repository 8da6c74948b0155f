#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "gpattr/attribution.hpp"

namespace oracles {

// Projected coordinate descent on 1/2 x'Vx - b'x + gamma sum_{k>=1} x_k, x >= 0.
inline Eigen::VectorXd coordinate_descent(const Eigen::MatrixXd& V, const Eigen::VectorXd& b, double gamma,
                                          double tol = 1e-13, int max_sweeps = 1000000) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      if (V(k, k) <= 0.0) continue;
      const double pen = k == 0 ? 0.0 : gamma;
      const double r = b(k) - V.row(k).dot(x) + V(k, k) * x(k);
      const double next = std::max(0.0, (r - pen) / V(k, k));
      change = std::max(change, std::abs(next - x(k)));
      x(k) = next;
    }
    if (change < tol) break;
  }
  return x;
}

// Kolmogorov distribution tail P(K > sqrt(n) D), asymptotic series with the
// usual small-sample correction.
inline double ks_pvalue(std::vector<double> sample, double (*cdf)(double)) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double sq = std::sqrt(n);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  double p = 0.0;
  for (int j = 1; j < 200; ++j) p += 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
  return std::clamp(p, 0.0, 1.0);
}

// sum over all R' in [R, Omega] of dre(R') pmf(R').
inline double exhaustive_tre(const gpattr::ConversionContext& ctx, const gpattr::RemovalSet& removal,
                             double* pmf_total = nullptr) {
  const auto free = ctx.thinning_candidates(removal);
  double total = 0.0, mass = 0.0;
  for (std::size_t bits = 0; bits < (std::size_t{1} << free.size()); ++bits) {
    std::vector<std::size_t> cand = removal.positions;
    for (std::size_t j = 0; j < free.size(); ++j)
      if (bits >> j & 1) cand.push_back(free[j]);
    std::sort(cand.begin(), cand.end());
    const double pmf = gpattr::removal_pmf(ctx, removal, cand);
    mass += pmf;
    total += pmf * gpattr::dre(ctx, gpattr::RemovalSet(cand, removal.target));
  }
  if (pmf_total) *pmf_total = mass;
  return total;
}

}  // namespace oracles
