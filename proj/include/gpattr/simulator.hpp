#pragma once

#include <cstdint>
#include <vector>

#include "gpattr/catalog.hpp"
#include "gpattr/io.hpp"
#include "gpattr/model.hpp"

namespace gpattr {

/// Synthetic study: firm-initiated types arrive as homogeneous Poisson
/// processes, customer-initiated types follow the model intensities.
struct Scenario {
  EventCatalog catalog;
  ModelParams params;
  std::vector<double> firm_rates;  // per type index, events/day; ignored for customer types
  double horizon = 365.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument if an invariant does not hold.
  void validate() const;
};

/// Simulates path `index`. Types in `disabled` never occur and never excite.
///
/// Customer events come from thinning a per-type unit-rate Poisson process on
/// [0, T] x [0, inf): a point (t, u) becomes a type-e event iff
/// u < lambda_e(t | H_t). Only points below the running bound (lambda just
/// after the latest event or candidate) are examined. Every (path, type)
/// stream is keyed independently, so a run with some types disabled reuses
/// the same points and yields a thinning of the full run.
Path simulate_path(const Scenario& scenario, std::size_t index, const TypeSet& disabled);

std::vector<Path> simulate(const Scenario& scenario, const TypeSet& disabled, unsigned threads = 1);

std::size_t count_conversions(const std::vector<Path>& paths);

struct ChannelCcc {
  ChannelIndex channel = 0;
  std::size_t total_conversions = 0;
  std::size_t conversions_off = 0;
  double ccc = 0.0;
};

/// CCC_z = (conversions with everything on) - (conversions with channel z off), coupled runs.
ChannelCcc ground_truth_ccc(const Scenario& scenario, ChannelIndex z, unsigned threads = 1);

struct GroundTruth {
  std::vector<std::string> channels;
  std::size_t total_conversions = 0;
  std::vector<std::size_t> conversions_off;
  std::vector<double> ccc;
  std::vector<double> proportions;
};

/// CCC for every channel; reuses `base` (the all-on paths) when given.
GroundTruth ground_truth(const Scenario& scenario, unsigned threads = 1, const std::vector<Path>* base = nullptr);

Json ground_truth_to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const Json& j);

/// `{"catalog": {...}, "model": {...}, "firm_rates": {name: rate}, "T", "n_paths", "seed"}`
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& scenario);

/// The two-channel display/search study: display impressions are firm
/// Poisson arrivals at 0.02/day, search impressions have baseline 0.02,
/// conversions 1e-4, clicks 0; ExpDecay kernels with T0 = 10 days.
Scenario hawkes_two_channel_scenario(std::size_t n_paths = 10000, double horizon = 365.0, std::uint64_t seed = 1);

}  // namespace gpattr
