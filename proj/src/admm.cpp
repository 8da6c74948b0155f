#include <algorithm>
#include <cmath>
#include <vector>

#include "gpattr/error.hpp"
#include "gpattr/estimation.hpp"

namespace gpattr {
namespace {

// argmin_{x >= 0} 1/2 x'Mx - c'x for positive definite M (Lawson-Hanson active set).
Eigen::VectorXd nonnegative_qp(const Eigen::MatrixXd& M, const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> free(static_cast<std::size_t>(n), false);
  const double tol = 1e-14 * std::max(1.0, c.lpNorm<Eigen::Infinity>());

  auto solve_free = [&] {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < n; ++k)
      if (free[static_cast<std::size_t>(k)]) idx.push_back(k);
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd sub(m, m);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      rhs(i) = c(idx[i]);
      for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = M(idx[i], idx[j]);
    }
    const Eigen::VectorXd sol = sub.llt().solve(rhs);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) z(idx[i]) = sol(i);
    return z;
  };

  for (int outer = 0; outer < 10 * n + 10; ++outer) {
    const Eigen::VectorXd w = c - M * x;
    Eigen::Index best = -1;
    for (Eigen::Index k = 0; k < n; ++k)
      if (!free[static_cast<std::size_t>(k)] && w(k) > tol && (best < 0 || w(k) > w(best))) best = k;
    if (best < 0) break;
    free[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < 10 * n + 10; ++inner) {
      const Eigen::VectorXd z = solve_free();
      double step = 1.0;
      bool feasible = true;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (free[static_cast<std::size_t>(k)] && z(k) <= 0.0) {
          feasible = false;
          const double denom = x(k) - z(k);
          if (denom > 0.0) step = std::min(step, x(k) / denom);
        }
      }
      if (feasible) {
        x = z;
        break;
      }
      x += step * (z - x);
      for (Eigen::Index k = 0; k < n; ++k) {
        if (free[static_cast<std::size_t>(k)] && x(k) <= tol) {
          free[static_cast<std::size_t>(k)] = false;
          x(k) = 0.0;
        }
      }
    }
  }
  return x.cwiseMax(0.0);
}

}  // namespace

double penalized_objective(const NodeDesign& design, const Eigen::VectorXd& theta, double gamma) {
  const int p = design.dimension() - 1;
  return 0.5 * theta.dot(design.V * theta) - design.b.dot(theta) + gamma * theta.tail(p).lpNorm<1>();
}

double least_squares_loss(const NodeDesign& design, const Eigen::VectorXd& theta) {
  return 0.5 * theta.dot(design.V * theta) - design.b.dot(theta);
}

Eigen::VectorXd AdmmResult::theta() const {
  Eigen::VectorXd out(alpha.size() + 1);
  out(0) = mu;
  out.tail(alpha.size()) = alpha;
  return out;
}

AdmmSolver::AdmmSolver(const NodeDesign& design, AdmmConfig config) : design_(design), config_(config) {
  const int dim = design.dimension();
  if (dim < 2 || design.V.rows() != dim || design.V.cols() != dim)
    throw InvalidArgument("design dimensions are inconsistent");
  if (!(config.eta > 0.0)) throw InvalidArgument("ADMM penalty eta must be positive");
  if (!(config.gamma >= 0.0)) throw InvalidArgument("regularization gamma must be nonnegative");
  if (!(config.tol_primal > 0.0) || !(config.tol_dual > 0.0)) throw InvalidArgument("ADMM tolerances must be positive");
  if (config.max_iter < 1) throw InvalidArgument("max_iter must be positive");
  if (!(design.V(0, 0) > 0.0))
    throw DegenerateDesign("degenerate design for target " + std::to_string(design.target) +
                           ": the constant column has zero mass");
  Eigen::MatrixXd system = design.V;
  system.diagonal().tail(dim - 1).array() += config.eta;
  system_ = system;
  factor_.compute(system);
  if (factor_.info() != Eigen::Success)
    throw DegenerateDesign("V + diag(0, eta I) is not positive definite for target " +
                           std::to_string(design.target));
}

AdmmState AdmmSolver::initial_state() const {
  const int p = design_.dimension() - 1;
  return {Eigen::VectorXd::Zero(p + 1), Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p)};
}

void AdmmSolver::step(AdmmState& s) const {
  const int p = design_.dimension() - 1;
  const double eta = config_.eta;
  Eigen::VectorXd rhs = design_.b;
  rhs.tail(p) += eta * s.split - s.dual;
  s.theta = factor_.solve(rhs);
  // Projection onto the orthant in the metric of the system matrix: the exact
  // constrained minimiser, equal to the solve itself when it is nonnegative.
  if (s.theta.minCoeff() < 0.0) s.theta = nonnegative_qp(system_, rhs);
  s.split = (s.theta.tail(p) + s.dual / eta).array() - config_.gamma / eta;
  s.split = s.split.cwiseMax(0.0);
  s.dual += eta * (s.theta.tail(p) - s.split);
}

AdmmResult AdmmSolver::solve() const { return solve(initial_state()); }

AdmmResult AdmmSolver::solve(AdmmState state) const {
  const int p = design_.dimension() - 1;
  AdmmResult r;
  for (r.iterations = 1; r.iterations <= config_.max_iter; ++r.iterations) {
    const Eigen::VectorXd previous = state.split;
    step(state);
    r.primal_residual = (state.theta.tail(p) - state.split).lpNorm<Eigen::Infinity>();
    r.dual_residual = config_.eta * (state.split - previous).lpNorm<Eigen::Infinity>();
    if (r.primal_residual <= config_.tol_primal && r.dual_residual <= config_.tol_dual) {
      r.converged = true;
      break;
    }
  }
  r.iterations = std::min(r.iterations, config_.max_iter);
  r.mu = state.theta(0);
  r.alpha = state.split;
  r.objective = penalized_objective(design_, r.theta(), config_.gamma);
  return r;
}

AdmmResult admm_fit(const NodeDesign& design, const AdmmConfig& config) { return AdmmSolver(design, config).solve(); }

}  // namespace gpattr
