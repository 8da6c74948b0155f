#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "gpattr/error.hpp"
#include "gpattr/estimation.hpp"
#include "gpattr/parallel.hpp"

namespace gpattr {
namespace {

// int_0^L exp(-rate u) du
double decayed_length(double length, double rate) {
  if (rate == 0.0) return length;
  return -std::expm1(-rate * length) / rate;
}

bool column_is_exp(const KernelTable& kernels, TypeIndex target) {
  for (TypeIndex s = 0; s < kernels.num_types(); ++s)
    if (kernels(s, target).shape() != KernelShape::ExpDecay) return false;
  return true;
}

DesignSums exp_design(const Path& path, const KernelTable& kernels, TypeIndex target) {
  const int p = kernels.num_types();
  const int dim = p + 1;
  DesignSums sums(dim);
  sums.n = 1;

  Eigen::VectorXd rate(dim), x = Eigen::VectorXd::Zero(dim);
  rate(0) = 0.0;
  x(0) = 1.0;
  for (int k = 1; k < dim; ++k) rate(k) = 1.0 / kernels(k - 1, target).scale();

  auto accumulate = [&](double length) {
    if (length <= 0.0) return;
    for (int k = 0; k < dim; ++k) {
      if (x(k) == 0.0) continue;
      for (int l = k; l < dim; ++l)
        if (x(l) != 0.0) sums.V(k, l) += x(k) * x(l) * decayed_length(length, rate(k) + rate(l));
    }
    for (int k = 1; k < dim; ++k) x(k) *= std::exp(-rate(k) * length);
  };

  double prev = 0.0;
  for (const Event& ev : path.events) {
    accumulate(ev.t - prev);
    if (ev.type == target) sums.b += x;
    x(ev.type + 1) += rate(ev.type + 1);
    prev = ev.t;
  }
  accumulate(path.horizon - prev);
  sums.V.triangularView<Eigen::StrictlyLower>() = sums.V.transpose().triangularView<Eigen::StrictlyLower>();
  return sums;
}

// Feature vector at t. `right` selects the right limit (events at t included).
void features_at(const Path& path, const KernelTable& kernels, TypeIndex target, double t, bool right,
                 Eigen::VectorXd& x) {
  x.setZero();
  x(0) = 1.0;
  for (const Event& ev : path.events) {
    if (right ? ev.t > t : ev.t >= t) break;
    const Kernel& psi = kernels(ev.type, target);
    x(ev.type + 1) += right ? psi.right_limit(t - ev.t) : psi(t - ev.t);
  }
}

DesignSums trapezoid_design(const Path& path, const KernelTable& kernels, TypeIndex target, double step) {
  const int p = kernels.num_types();
  const int dim = p + 1;
  DesignSums sums(dim);
  sums.n = 1;

  double min_scale = kernels(0, target).scale();
  for (TypeIndex s = 0; s < p; ++s) min_scale = std::min(min_scale, kernels(s, target).scale());

  std::vector<double> cuts{0.0, path.horizon};
  for (const Event& ev : path.events) {
    cuts.push_back(ev.t);
    const Kernel& psi = kernels(ev.type, target);
    if (psi.shape() == KernelShape::Boxcar && ev.t + psi.scale() < path.horizon) cuts.push_back(ev.t + psi.scale());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  Eigen::VectorXd x(dim);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], c = cuts[s + 1], length = c - a;
    const double h = step > 0.0 ? step : std::min(min_scale / 50.0, length / 8.0);
    const auto m = static_cast<long>(std::max(1.0, std::ceil(length / h - 1e-9)));
    const double w = length / static_cast<double>(m);
    for (long j = 0; j <= m; ++j) {
      const double t = j == m ? c : a + static_cast<double>(j) * w;
      features_at(path, kernels, target, t, j == 0, x);
      if (!x.allFinite()) throw Error("non-finite integrand while assembling the design");
      const double weight = (j == 0 || j == m) ? 0.5 * w : w;
      sums.V.selfadjointView<Eigen::Upper>().rankUpdate(x, weight);
    }
  }
  sums.V.triangularView<Eigen::StrictlyLower>() = sums.V.transpose().triangularView<Eigen::StrictlyLower>();

  for (const Event& ev : path.events) {
    if (ev.type != target) continue;
    features_at(path, kernels, target, ev.t, false, x);
    sums.b += x;
  }
  return sums;
}

bool canonical_less(const Path& a, const Path& b) {
  if (a.id != b.id) return a.id < b.id;
  if (a.horizon != b.horizon) return a.horizon < b.horizon;
  return std::lexicographical_compare(a.events.begin(), a.events.end(), b.events.begin(), b.events.end(),
                                      [](const Event& x, const Event& y) {
                                        return std::tie(x.t, x.type) < std::tie(y.t, y.type);
                                      });
}

}  // namespace

DesignSums::DesignSums(int dimension)
    : V(Eigen::MatrixXd::Zero(dimension, dimension)), b(Eigen::VectorXd::Zero(dimension)) {}

DesignSums& DesignSums::operator+=(const DesignSums& other) {
  V += other.V;
  b += other.b;
  n += other.n;
  return *this;
}

NodeDesign DesignSums::normalized(TypeIndex target) const {
  if (n == 0) throw DegenerateDesign("design over zero paths");
  const double inv = 1.0 / static_cast<double>(n);
  NodeDesign d{target, V * inv, b * inv, n};
  d.V = 0.5 * (d.V + d.V.transpose()).eval();
  return d;
}

DesignSums path_design(const Path& path, const KernelTable& kernels, TypeIndex target, Quadrature quadrature,
                       double trapezoid_step) {
  if (target < 0 || target >= kernels.num_customer()) throw InvalidArgument("design target must be customer-initiated");
  DesignSums sums = (quadrature == Quadrature::Auto && column_is_exp(kernels, target))
                        ? exp_design(path, kernels, target)
                        : trapezoid_design(path, kernels, target, trapezoid_step);
  if (!sums.V.allFinite() || !sums.b.allFinite())
    throw Error("non-finite design entries for path '" + path.id + "'");
  return sums;
}

std::vector<std::size_t> canonical_order(std::span<const Path> paths) {
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return canonical_less(paths[i], paths[j]); });
  return order;
}

NodeDesign build_design(std::span<const Path> paths, const KernelTable& kernels, TypeIndex target,
                        Quadrature quadrature, unsigned threads) {
  if (paths.empty()) throw DegenerateDesign("no paths to build a design from");
  const auto order = canonical_order(paths);
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (order.size() + kChunk - 1) / kChunk;
  const int dim = kernels.num_types() + 1;
  std::vector<DesignSums> partial(chunks, DesignSums(dim));
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t hi = std::min(order.size(), (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < hi; ++k) partial[c] += path_design(paths[order[k]], kernels, target, quadrature);
  });
  DesignSums total(dim);
  for (const auto& part : partial) total += part;
  return total.normalized(target);
}

}  // namespace gpattr
