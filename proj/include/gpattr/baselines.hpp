#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gpattr/catalog.hpp"

namespace gpattr {

enum class BaselineMethod { Last, First, Linear, Decay, UShaped, Logistic, Markov };

BaselineMethod parse_baseline_method(std::string_view name);
std::string_view to_string(BaselineMethod method);

struct BaselineSpec {
  BaselineMethod method = BaselineMethod::Linear;
  double half_life = 7.0;  // days, Decay only
};

/// Touchpoints credited for the conversion at `target`: every non-conversion
/// event strictly before it.
std::vector<std::size_t> touchpoints_before(const Path& path, std::size_t target);

/// Rule-based credit over the touchpoints before `target`; empty when there are none.
std::map<std::size_t, double> rule_score(const Path& path, std::size_t target, const BaselineSpec& spec);

/// Logistic regression of the conversion indicator on per-type touch counts.
class LogisticAttribution {
 public:
  /// Maximum likelihood by damped Newton; on complete separation refits with
  /// an L2 penalty of 1e-4 on the mean log-likelihood and records a warning.
  LogisticAttribution(std::span<const Path> paths, const EventCatalog& catalog);

  /// Incremental credit p(full) - p(without the touch), floored at 0 and
  /// normalised over the touchpoints before `target`.
  std::map<std::size_t, double> score(const Path& path, std::size_t target) const;

  double probability(const Eigen::VectorXd& counts) const;
  Eigen::VectorXd counts(const Path& path) const;

  const Eigen::VectorXd& coefficients() const noexcept { return beta_; }  // intercept first
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  bool ridge() const noexcept { return ridge_; }

 private:
  int num_types_;
  Eigen::VectorXd beta_;
  bool ridge_ = false;
  std::vector<std::string> warnings_;
};

struct MarkovResult {
  std::vector<double> removal_effect;  // per channel
  double conversion_probability = 0.0;
  std::vector<std::string> warnings;
};

/// First-order Markov chain over {START, channels, CONV, NULL}; removal effect
/// of z is 1 - P(CONV | z redirected to NULL) / P(CONV).
MarkovResult markov_removal(std::span<const Path> paths, const EventCatalog& catalog);

/// Absorption probabilities into CONV for a chain with `transient` states.
/// counts(i, j): transitions between transient states; to_conv(i), to_null(i): exits.
/// Returns the probability of reaching CONV from each transient state.
Eigen::VectorXd conversion_absorption(const Eigen::MatrixXd& counts, const Eigen::VectorXd& to_conv,
                                      const Eigen::VectorXd& to_null);

}  // namespace gpattr
