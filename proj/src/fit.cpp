#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "gpattr/error.hpp"
#include "gpattr/estimation.hpp"
#include "gpattr/parallel.hpp"

namespace gpattr {
namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

double FitConfig::gamma_for(TypeIndex node) const {
  if (gamma.empty()) return 0.0;
  if (gamma.size() == 1) return gamma.front();
  return gamma.at(static_cast<std::size_t>(node));
}

AdmmConfig FitConfig::admm(TypeIndex node) const {
  return AdmmConfig{gamma_for(node), eta, tol_primal, tol_dual, max_iter};
}

bool FitResult::converged() const {
  return std::all_of(nodes.begin(), nodes.end(), [](const NodeDiagnostics& d) { return d.converged; });
}

FitResult fit_designs(std::span<const NodeDesign> designs, const KernelTable& kernels, const FitConfig& config) {
  const int q = kernels.num_customer();
  if (static_cast<int>(designs.size()) != q) throw InvalidArgument("need one design per customer-initiated type");
  if (config.gamma.size() > 1 && static_cast<int>(config.gamma.size()) != q)
    throw InvalidArgument("gamma must be a single value or one per customer-initiated type");

  FitResult result{ModelParams(kernels), std::vector<NodeDiagnostics>(static_cast<std::size_t>(q))};
  std::vector<AdmmResult> fits(static_cast<std::size_t>(q));
  parallel_for(static_cast<std::size_t>(q), config.threads, [&](std::size_t e) {
    try {
      const AdmmConfig admm = config.admm(static_cast<TypeIndex>(e));
      fits[e] = admm_fit(designs[e], admm);
      if (config.refit) {
        const double gamma = admm.gamma;
        fits[e] = refit_on_support(designs[e], fits[e].alpha, admm);
        fits[e].objective = penalized_objective(designs[e], fits[e].theta(), gamma);
      }
    } catch (const Error& err) {
      throw Error("node " + std::to_string(e) + ": " + err.what());
    }
  });
  for (int e = 0; e < q; ++e) {
    const auto& f = fits[static_cast<std::size_t>(e)];
    result.params.mu(e) = std::max(0.0, f.mu);
    result.params.alpha.col(e) = f.alpha.cwiseMax(0.0);
    result.nodes[static_cast<std::size_t>(e)] = {e, config.gamma_for(e), f.iterations, f.primal_residual,
                                                 f.dual_residual, f.objective, f.converged};
  }
  return result;
}

FitResult fit_all(std::span<const Path> paths, const EventCatalog& catalog, const KernelTable& kernels,
                  const FitConfig& config) {
  if (kernels.num_types() != catalog.num_types() || kernels.num_customer() != catalog.num_customer())
    throw InvalidArgument("kernel table does not match the catalog");
  std::vector<NodeDesign> designs;
  for (TypeIndex e = 0; e < catalog.num_customer(); ++e)
    designs.push_back(build_design(paths, kernels, e, config.quadrature, config.threads));
  return fit_designs(designs, kernels, config);
}

AdmmResult refit_on_support(const NodeDesign& design, const Eigen::VectorXd& support, AdmmConfig config) {
  const int p = design.dimension() - 1;
  if (support.size() != p) throw InvalidArgument("support must have one entry per source type");
  std::vector<int> keep{0};
  for (int k = 0; k < p; ++k)
    if (support(k) > 0.0) keep.push_back(k + 1);
  const auto m = static_cast<Eigen::Index>(keep.size());
  NodeDesign sub;
  sub.target = design.target;
  sub.n = design.n;
  sub.V.resize(m, m);
  sub.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    sub.b(i) = design.b(keep[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m; ++j)
      sub.V(i, j) = design.V(keep[static_cast<std::size_t>(i)], keep[static_cast<std::size_t>(j)]);
  }
  AdmmResult out;
  out.alpha = Eigen::VectorXd::Zero(p);
  if (m == 1) {
    // Only the baseline: closed form.
    out.mu = std::max(0.0, sub.b(0) / sub.V(0, 0));
    out.converged = true;
  } else {
    config.gamma = 0.0;
    const AdmmResult r = admm_fit(sub, config);
    out.mu = r.mu;
    for (Eigen::Index i = 1; i < m; ++i) out.alpha(keep[static_cast<std::size_t>(i)] - 1) = r.alpha(i - 1);
    out.iterations = r.iterations;
    out.primal_residual = r.primal_residual;
    out.dual_residual = r.dual_residual;
    out.converged = r.converged;
  }
  out.objective = penalized_objective(design, out.theta(), 0.0);
  return out;
}

double gamma_max(const NodeDesign& design) {
  const double mu0 = design.V(0, 0) > 0.0 ? std::max(0.0, design.b(0) / design.V(0, 0)) : 0.0;
  double g = 0.0;
  for (int k = 1; k < design.dimension(); ++k) g = std::max(g, design.b(k) - design.V(k, 0) * mu0);
  return g;
}

std::vector<double> default_relative_grid(int points, double decades) {
  std::vector<double> grid;
  for (int i = 0; i < points; ++i)
    grid.push_back(std::pow(10.0, -decades * static_cast<double>(i) / static_cast<double>(std::max(1, points - 1))));
  grid.push_back(0.0);
  return grid;
}

GammaSelection select_gamma(std::span<const Path> paths, const EventCatalog& catalog, const KernelTable& kernels,
                            const GammaSearch& search, const FitConfig& base) {
  if (search.grid.empty()) throw InvalidArgument("gamma grid must be nonempty");
  if (search.folds < 2) throw InvalidArgument("need at least two folds");
  for (double g : search.grid)
    if (!(g >= 0.0)) throw InvalidArgument("gamma grid values must be nonnegative");

  const int q = catalog.num_customer();
  const int dim = catalog.num_types() + 1;
  const auto k_folds = static_cast<std::size_t>(search.folds);
  const auto order = canonical_order(paths);

  GammaSelection sel;
  sel.gamma.assign(static_cast<std::size_t>(q), 0.0);
  sel.grid.resize(static_cast<std::size_t>(q));
  sel.cv_loss.resize(static_cast<std::size_t>(q));
  sel.cv_se.resize(static_cast<std::size_t>(q));

  std::vector<std::size_t> fold_of(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) fold_of[i] = fnv1a(paths[i].id) % k_folds;

  for (TypeIndex e = 0; e < q; ++e) {
    const auto ue = static_cast<std::size_t>(e);
    std::vector<DesignSums> fold(k_folds, DesignSums(dim));
    for (std::size_t i : order) fold[fold_of[i]] += path_design(paths[i], kernels, e, base.quadrature);
    DesignSums all(dim);
    for (const auto& f : fold) all += f;

    std::vector<double> grid = search.grid;
    if (search.relative) {
      const double gmax = gamma_max(all.normalized(e));
      for (double& g : grid) g *= gmax;
    }
    sel.grid[ue] = grid;

    std::vector<std::vector<double>> losses(grid.size());
    for (std::size_t f = 0; f < k_folds; ++f) {
      if (fold[f].n == 0 || fold[f].b(0) == 0.0) {
        sel.warnings.push_back("node " + catalog.type_name(e) + ": fold " + std::to_string(f) +
                               " has no target events; skipped");
        continue;
      }
      DesignSums train(dim);
      for (std::size_t g = 0; g < k_folds; ++g)
        if (g != f) train += fold[g];
      if (train.n == 0 || train.V(0, 0) <= 0.0) {
        sel.warnings.push_back("node " + catalog.type_name(e) + ": fold " + std::to_string(f) +
                               " leaves an empty training set; skipped");
        continue;
      }
      const NodeDesign train_design = train.normalized(e);
      const NodeDesign test_design = fold[f].normalized(e);
      std::vector<double> fold_loss(grid.size());
      parallel_for(grid.size(), base.threads, [&](std::size_t gi) {
        AdmmConfig cfg = base.admm(e);
        cfg.gamma = grid[gi];
        fold_loss[gi] = least_squares_loss(test_design, admm_fit(train_design, cfg).theta());
      });
      for (std::size_t gi = 0; gi < grid.size(); ++gi) losses[gi].push_back(fold_loss[gi]);
    }

    auto& mean = sel.cv_loss[ue];
    auto& se = sel.cv_se[ue];
    for (const auto& l : losses) {
      if (l.empty()) {
        mean.push_back(std::numeric_limits<double>::quiet_NaN());
        se.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      double m = 0.0;
      for (double v : l) m += v;
      m /= static_cast<double>(l.size());
      double ss = 0.0;
      for (double v : l) ss += (v - m) * (v - m);
      mean.push_back(m);
      se.push_back(l.size() > 1 ? std::sqrt(ss / static_cast<double>(l.size() - 1) / static_cast<double>(l.size()))
                                : 0.0);
    }

    if (losses.front().empty()) {
      sel.warnings.push_back("node " + catalog.type_name(e) + ": every fold was skipped; using the largest gamma");
      sel.gamma[ue] = *std::max_element(grid.begin(), grid.end());
      continue;
    }
    std::size_t best = 0;
    for (std::size_t gi = 1; gi < grid.size(); ++gi)
      if (mean[gi] < mean[best]) best = gi;
    double limit = mean[best] + 1e-12 * std::abs(mean[best]);
    if (search.rule == GammaRule::OneStdError) limit = mean[best] + se[best];
    double chosen = grid[best];
    for (std::size_t gi = 0; gi < grid.size(); ++gi)
      if (mean[gi] <= limit) chosen = std::max(chosen, grid[gi]);
    sel.gamma[ue] = chosen;
  }
  return sel;
}

}  // namespace gpattr
