#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "gpattr/catalog.hpp"
#include "gpattr/model.hpp"

namespace gpattr {

enum class Quadrature {
  Auto,       // closed form for ExpDecay columns, trapezoid otherwise
  Trapezoid,  // composite trapezoid everywhere
};

/// Least-squares design for one customer-initiated target e:
///   V_kk' = (1/n) sum_j int_0^{T_j} X_jk X_jk' dt,   b_k = (1/n) sum_j int X_jk dN_e.
/// Index 0 is the constant column, index k >= 1 the excitation from type k - 1.
struct NodeDesign {
  TypeIndex target = 0;
  Eigen::MatrixXd V;
  Eigen::VectorXd b;
  std::size_t n = 0;

  int dimension() const noexcept { return static_cast<int>(b.size()); }
};

/// Unnormalised per-path sums of a NodeDesign; additive over disjoint path sets.
struct DesignSums {
  Eigen::MatrixXd V;
  Eigen::VectorXd b;
  std::size_t n = 0;

  explicit DesignSums(int dimension = 0);
  DesignSums& operator+=(const DesignSums& other);
  NodeDesign normalized(TypeIndex target) const;
};

/// Contribution of a single path. `trapezoid_step` <= 0 selects min(T0/50, segment/8).
DesignSums path_design(const Path& path, const KernelTable& kernels, TypeIndex target,
                       Quadrature quadrature = Quadrature::Auto, double trapezoid_step = 0.0);

/// Permutation sorting paths by (path_id, horizon, events).
std::vector<std::size_t> canonical_order(std::span<const Path> paths);

/// Averages path_design over `paths`, reduced in canonical path order so the
/// result does not depend on input order or thread count.
NodeDesign build_design(std::span<const Path> paths, const KernelTable& kernels, TypeIndex target,
                        Quadrature quadrature = Quadrature::Auto, unsigned threads = 1);

/// 1/2 theta' V theta - b' theta + gamma * ||theta_{1..p}||_1.
double penalized_objective(const NodeDesign& design, const Eigen::VectorXd& theta, double gamma);

struct AdmmConfig {
  double gamma = 0.0;  // L1 weight on the alpha block
  double eta = 1.0;    // augmented-Lagrangian penalty
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  int max_iter = 10000;
};

/// Iterates of the splitting alpha = alpha'.
struct AdmmState {
  Eigen::VectorXd theta;  // (mu, alpha), length p + 1
  Eigen::VectorXd split;  // alpha', length p
  Eigen::VectorXd dual;   // omega, length p
};

struct AdmmResult {
  double mu = 0.0;
  Eigen::VectorXd alpha;  // from the sparse alpha' iterate
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  bool converged = false;

  Eigen::VectorXd theta() const;
};

/// ADMM for min_{theta >= 0} 1/2 theta'V theta - b'theta + gamma ||alpha||_1.
class AdmmSolver {
 public:
  AdmmSolver(const NodeDesign& design, AdmmConfig config);

  AdmmState initial_state() const;
  /// One sweep of the three updates:
  ///   theta  <- [(V + diag(0, eta I))^{-1} (b + (0, eta alpha' - omega))]_+
  ///   alpha' <- (alpha + omega/eta - gamma/eta)_+
  ///   omega  <- omega + eta (alpha - alpha')
  /// The projection is taken in the metric of V + diag(0, eta I), so the
  /// theta-step is the exact minimiser over theta >= 0.
  void step(AdmmState& state) const;
  AdmmResult solve() const;
  AdmmResult solve(AdmmState state) const;

 private:
  const NodeDesign& design_;
  AdmmConfig config_;
  Eigen::MatrixXd system_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

AdmmResult admm_fit(const NodeDesign& design, const AdmmConfig& config);

/// Unpenalised fit restricted to mu and the coordinates where `support` is
/// positive; every other alpha stays exactly zero.
AdmmResult refit_on_support(const NodeDesign& design, const Eigen::VectorXd& support, AdmmConfig config);

struct FitConfig {
  std::vector<double> gamma;  // one per customer node, or a single shared value
  double eta = 1.0;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  int max_iter = 10000;
  Quadrature quadrature = Quadrature::Auto;
  unsigned threads = 1;
  bool refit = false;  // re-solve with gamma = 0 on the selected support

  double gamma_for(TypeIndex node) const;
  AdmmConfig admm(TypeIndex node) const;
};

struct NodeDiagnostics {
  TypeIndex target = 0;
  double gamma = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double objective = 0.0;
  bool converged = false;
};

struct FitResult {
  ModelParams params;
  std::vector<NodeDiagnostics> nodes;

  bool converged() const;
};

/// Node-wise fit of every customer-initiated type.
FitResult fit_all(std::span<const Path> paths, const EventCatalog& catalog, const KernelTable& kernels,
                  const FitConfig& config);
FitResult fit_designs(std::span<const NodeDesign> designs, const KernelTable& kernels, const FitConfig& config);

enum class GammaRule {
  MinLoss,        // smallest held-out loss, ties toward larger gamma
  OneStdError,    // largest gamma within one standard error of the minimum
};

struct GammaSelection {
  std::vector<double> gamma;                 // per node
  std::vector<std::vector<double>> grid;     // per node, values tried
  std::vector<std::vector<double>> cv_loss;  // per node x grid
  std::vector<std::vector<double>> cv_se;    // per node x grid
  std::vector<std::string> warnings;
};

struct GammaSearch {
  std::vector<double> grid{0.0};
  bool relative = false;  // grid values multiply each node's gamma_max
  int folds = 5;
  GammaRule rule = GammaRule::MinLoss;
};

/// Smallest gamma for which alpha = 0 satisfies the optimality conditions.
double gamma_max(const NodeDesign& design);

/// A relative grid: 1 down to 10^-decades in `points` log-steps, then 0.
std::vector<double> default_relative_grid(int points = 20, double decades = 4.0);

/// K-fold selection of gamma per node by held-out least-squares loss.
/// Folds are assigned by a hash of path_id, so the choice is order-invariant.
GammaSelection select_gamma(std::span<const Path> paths, const EventCatalog& catalog, const KernelTable& kernels,
                            const GammaSearch& search, const FitConfig& base);

/// Held-out loss 1/2 theta'V theta - b'theta of a design (unpenalised).
double least_squares_loss(const NodeDesign& design, const Eigen::VectorXd& theta);

}  // namespace gpattr
