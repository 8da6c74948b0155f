#include "gpattr/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gpattr/error.hpp"
#include "gpattr/rng.hpp"

namespace gpattr {
namespace {

constexpr double kProbabilitySlack = 1e-9;

void require_nonempty(const RemovalSet& removal) {
  if (removal.empty()) throw InvalidArgument("total removal effect needs a nonempty removal set");
}

}  // namespace

ConversionContext::ConversionContext(const Path& path, const ModelParams& params, std::size_t target)
    : path_(path), params_(params), target_(target), n_(target + 1) {
  if (target >= path.events.size()) throw InvalidArgument("conversion position is past the end of the path");
  if (path.events[target].type != EventCatalog::conversion())
    throw InvalidArgument("scored event is not a conversion");
  lambda_.assign(n_, 0.0);
  excite_.assign(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const Event& ev = path.events[i];
    if (!params.is_customer(ev.type)) continue;
    double lambda = params.mu(ev.type);
    for (std::size_t j = 0; j < i; ++j) {
      const Event& src = path.events[j];
      const double a = params.alpha(src.type, ev.type);
      if (a == 0.0) continue;
      const double term = a * params.kernels(src.type, ev.type)(ev.t - src.t);
      excite_[i * n_ + j] = term;
      lambda += term;
    }
    lambda_[i] = lambda;
  }
}

void ConversionContext::require_defined() const {
  if (!(conversion_intensity() > 0.0))
    throw InvalidArgument("conversion intensity is zero at t=" + std::to_string(path_.events[target_].t) +
                          "; removal effects are undefined");
}

double ConversionContext::direct_share(std::size_t i) const {
  require_defined();
  return excitation(i, target_) / conversion_intensity();
}

double ConversionContext::parent_share(std::size_t from, std::size_t to) const {
  const double lambda = lambda_[to];
  return lambda > 0.0 ? excitation(from, to) / lambda : 0.0;
}

double ConversionContext::deletion_probability(std::size_t i, const EventMask& removed) const {
  double p = 0.0;
  for (std::size_t j = 0; j < i && j < removed.size(); ++j)
    if (removed[j]) p += parent_share(j, i);
  if (p < -kProbabilitySlack || p > 1.0 + kProbabilitySlack)
    throw InvariantViolation("deletion probability " + std::to_string(p) + " outside [0, 1]");
  return std::clamp(p, 0.0, 1.0);
}

std::vector<std::size_t> ConversionContext::thinning_candidates(const RemovalSet& removal) const {
  std::vector<std::size_t> out;
  if (removal.empty()) return out;
  for (std::size_t i = removal.min_position() + 1; i < target_; ++i)
    if (is_customer(i) && !removal.contains(i)) out.push_back(i);
  return out;
}

std::string_view to_string(ScoreMethod method) {
  switch (method) {
    case ScoreMethod::Dre: return "dre";
    case ScoreMethod::TreThinning: return "tre-thinning";
    case ScoreMethod::TreBackprop: return "tre";
  }
  return "dre";
}

double dre(const ConversionContext& ctx, const RemovalSet& removal) {
  ctx.require_defined();
  if (removal.target != ctx.target()) throw InvalidArgument("removal set targets a different conversion");
  double sum = 0.0;
  for (std::size_t i : removal.positions) {
    if (i >= ctx.target()) throw InvalidArgument("removal set contains an event at or after the target");
    sum += ctx.direct_share(i);
  }
  return sum;
}

double dre(const ConversionContext& ctx, const EventMask& removed) {
  ctx.require_defined();
  double sum = 0.0;
  for (std::size_t i = 0; i < ctx.target() && i < removed.size(); ++i)
    if (removed[i]) sum += ctx.direct_share(i);
  return sum;
}

double dre(const Path& path, const ModelParams& params, const RemovalSet& removal) {
  validate_removal(path, removal);
  return dre(ConversionContext(path, params, removal.target), removal);
}

ScoreBreakdown dre_breakdown(const Path& path, const ModelParams& params, std::size_t target) {
  ConversionContext ctx(path, params, target);
  ScoreBreakdown out;
  out.target = target;
  out.method = ScoreMethod::Dre;
  ctx.require_defined();
  const double lambda = ctx.conversion_intensity();
  for (std::size_t i = 0; i < target; ++i) out.scores[i] = ctx.direct_share(i);
  out.baseline_effect = params.mu(EventCatalog::conversion()) / lambda;
  return out;
}

double tre_backprop(const ConversionContext& ctx, const RemovalSet& removal) {
  require_nonempty(removal);
  if (removal.target != ctx.target()) throw InvalidArgument("removal set targets a different conversion");
  const std::size_t target = ctx.target();
  const std::size_t first = removal.min_position();
  std::vector<double> y(target, 0.0);
  for (std::size_t i = first; i < target; ++i) y[i] = ctx.direct_share(i);

  const auto downstream = ctx.thinning_candidates(removal);
  for (auto it = downstream.rbegin(); it != downstream.rend(); ++it) {
    const std::size_t i = *it;
    if (y[i] == 0.0) continue;
    for (std::size_t parent = 0; parent < i; ++parent) {
      const double share = ctx.parent_share(parent, i);
      if (share > 0.0) y[parent] += y[i] * share;
    }
  }
  double total = 0.0;
  for (std::size_t i : removal.positions) total += y[i];
  return total;
}

double tre_backprop(const Path& path, const ModelParams& params, const RemovalSet& removal) {
  validate_removal(path, removal);
  return tre_backprop(ConversionContext(path, params, removal.target), removal);
}

ThinningEstimate tre_thinning(const ConversionContext& ctx, const RemovalSet& removal, std::size_t replicates,
                              std::uint64_t seed) {
  require_nonempty(removal);
  if (replicates < 1) throw InvalidArgument("thinning needs at least one replicate");
  const std::size_t target = ctx.target();
  const auto downstream = ctx.thinning_candidates(removal);
  auto rng = make_stream(seed, target, 0, StreamPurpose::Replicates);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  EventMask base(target, 0);
  for (std::size_t i : removal.positions) base[i] = 1;
  const double base_score = dre(ctx, base);

  // Welford updates keep the variance accurate when replicates barely differ.
  double mean = 0.0, m2 = 0.0;
  EventMask removed;
  for (std::size_t l = 0; l < replicates; ++l) {
    removed = base;
    double x = base_score;
    for (std::size_t i : downstream) {
      const double p = ctx.deletion_probability(i, removed);
      if (p > 0.0 && unit(rng) < p) {
        removed[i] = 1;
        x += ctx.direct_share(i);
      }
    }
    const double delta = x - mean;
    mean += delta / static_cast<double>(l + 1);
    m2 += delta * (x - mean);
  }
  const double n = static_cast<double>(replicates);
  ThinningEstimate est;
  est.replicates = replicates;
  est.mean = mean;
  if (replicates > 1) est.std_error = std::sqrt(std::max(0.0, m2) / (n - 1.0) / n);
  return est;
}

ThinningEstimate tre_thinning(const Path& path, const ModelParams& params, const RemovalSet& removal,
                              std::size_t replicates, std::uint64_t seed) {
  validate_removal(path, removal);
  return tre_thinning(ConversionContext(path, params, removal.target), removal, replicates, seed);
}

double removal_pmf(const ConversionContext& ctx, const RemovalSet& removal, const std::vector<std::size_t>& candidate) {
  require_nonempty(removal);
  const std::size_t target = ctx.target();
  EventMask in(target, 0);
  for (std::size_t i : candidate) {
    if (i >= target) throw InvalidArgument("candidate removal set reaches the target");
    in[i] = 1;
  }
  for (std::size_t i : removal.positions)
    if (!in[i]) throw InvalidArgument("candidate removal set does not contain R");
  const auto omega = ctx.thinning_candidates(removal);
  for (std::size_t i : candidate)
    if (!removal.contains(i) && !std::binary_search(omega.begin(), omega.end(), i))
      throw InvalidArgument("candidate removal set is not contained in Omega");

  double prob = 1.0;
  for (std::size_t i : omega) {
    const double p = ctx.deletion_probability(i, in);
    prob *= in[i] ? p : 1.0 - p;
  }
  return prob;
}

double removal_pmf(const Path& path, const ModelParams& params, const RemovalSet& removal,
                   const std::vector<std::size_t>& candidate) {
  validate_removal(path, removal);
  return removal_pmf(ConversionContext(path, params, removal.target), removal, candidate);
}

}  // namespace gpattr
