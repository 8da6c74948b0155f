#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "gpattr/catalog.hpp"
#include "gpattr/intensity.hpp"
#include "gpattr/model.hpp"

namespace gpattr {

/// Pairwise excitation terms on the prefix of a path up to a conversion.
///
/// For positions i' < i <= target with e_i customer-initiated,
/// `excitation(i', i)` is alpha_{e_i' e_i} psi_{e_i' e_i}(t_i - t_i'), and
/// `intensity(i)` is lambda_{e_i}(t_i | H^D). Every removal-effect quantity is
/// linear in these terms.
class ConversionContext {
 public:
  ConversionContext(const Path& path, const ModelParams& params, std::size_t target);

  std::size_t target() const noexcept { return target_; }
  const Path& path() const noexcept { return path_; }
  bool is_customer(std::size_t i) const { return params_.is_customer(path_.events[i].type); }

  double intensity(std::size_t i) const { return lambda_[i]; }
  double excitation(std::size_t from, std::size_t to) const { return excite_[to * n_ + from]; }
  double conversion_intensity() const { return lambda_[target_]; }
  /// Throws InvalidArgument when lambda_1(t*) = 0.
  void require_defined() const;

  /// alpha psi(t* - t_i) / lambda_1(t*): singleton direct removal effect.
  double direct_share(std::size_t i) const;
  /// 1 - lambda_{e_i}(t_i | D \ removed) / lambda_{e_i}(t_i | D).
  double deletion_probability(std::size_t i, const EventMask& removed) const;
  /// Fraction of lambda_{e_i}(t_i) contributed by event `from`.
  double parent_share(std::size_t from, std::size_t to) const;

  /// Positions of customer events after i_min(R) and before the target, not in R.
  std::vector<std::size_t> thinning_candidates(const RemovalSet& removal) const;

 private:
  const Path& path_;
  const ModelParams& params_;
  std::size_t target_;
  std::size_t n_;
  std::vector<double> lambda_;
  std::vector<double> excite_;  // row `to`, column `from`
};

enum class ScoreMethod { Dre, TreThinning, TreBackprop };

std::string_view to_string(ScoreMethod method);

/// Per-event scores for one conversion.
struct ScoreBreakdown {
  std::map<std::size_t, double> scores;  // event position -> score
  double baseline_effect = 0.0;
  std::size_t target = 0;
  ScoreMethod method = ScoreMethod::Dre;
};

/// Direct removal effect sum_{i in R} alpha psi(t* - t_i) / lambda_1(t*).
/// Throws InvalidArgument when lambda_1(t*) = 0.
double dre(const Path& path, const ModelParams& params, const RemovalSet& removal);
double dre(const ConversionContext& ctx, const RemovalSet& removal);
/// DRE of an arbitrary removal mask (positions < target).
double dre(const ConversionContext& ctx, const EventMask& removed);

/// Singleton DRE of every event before the target plus the baseline effect mu_1/lambda_1.
ScoreBreakdown dre_breakdown(const Path& path, const ModelParams& params, std::size_t target);

struct ThinningEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t replicates = 0;
};

/// Monte-Carlo total removal effect: L thinning replicates of the downstream
/// customer events, averaging the DRE of the enlarged removal set.
ThinningEstimate tre_thinning(const Path& path, const ModelParams& params, const RemovalSet& removal,
                              std::size_t replicates, std::uint64_t seed);
ThinningEstimate tre_thinning(const ConversionContext& ctx, const RemovalSet& removal, std::size_t replicates,
                              std::uint64_t seed);

/// Exact total removal effect by propagating direct scores backwards along
/// Granger edges.
double tre_backprop(const Path& path, const ModelParams& params, const RemovalSet& removal);
double tre_backprop(const ConversionContext& ctx, const RemovalSet& removal);

/// P(R_diamond = candidate | D) for R subset candidate subset Omega.
double removal_pmf(const Path& path, const ModelParams& params, const RemovalSet& removal,
                   const std::vector<std::size_t>& candidate);
double removal_pmf(const ConversionContext& ctx, const RemovalSet& removal, const std::vector<std::size_t>& candidate);

}  // namespace gpattr
