#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpattr/estimation.hpp"
#include "gpattr/io.hpp"
#include "gpattr/simulator.hpp"

namespace gpattr {

struct ReproduceConfig {
  int runs = 10;
  std::uint64_t seed = 1;
  std::size_t n_paths = 10000;
  double horizon = 365.0;
  unsigned threads = 0;
  GammaSearch search{default_relative_grid(), true, 5, GammaRule::OneStdError};
  std::optional<double> fixed_gamma;  // skips cross-validation
  bool refit = true;
};

struct RunOutcome {
  int run = 0;
  std::uint64_t seed = 0;
  std::optional<std::string> error;
  std::size_t conversions = 0;
  std::vector<double> truth;  // CCC proportions
  std::vector<double> tre;    // CAS proportions
  std::vector<double> dre;
  double tre_kl = 0.0, tre_hellinger = 0.0;
  double dre_kl = 0.0, dre_hellinger = 0.0;
  bool graph_recovered = false;
  std::size_t false_edges = 0, missed_edges = 0;
  double param_error = 0.0;  // L-infinity over (mu, alpha), fitted vs true
  std::vector<double> gamma;
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& values);

struct ReproduceSummary {
  std::vector<std::string> channels;
  std::vector<RunOutcome> runs;
  std::size_t succeeded = 0;
  std::vector<MeanSe> truth, tre, dre;  // per channel
  MeanSe tre_kl, tre_hellinger, dre_kl, dre_hellinger;
  // Divergences of the run-averaged proportions.
  double tre_kl_of_means = 0.0, tre_hellinger_of_means = 0.0;
  double dre_kl_of_means = 0.0, dre_hellinger_of_means = 0.0;
  int graphs_recovered = 0;
};

/// One run of the two-channel study: simulate, ground truth by coupled
/// channel-off runs, select gamma and fit, score TRE and DRE per channel,
/// aggregate and compare.
RunOutcome run_hawkes_once(const Scenario& scenario, const ReproduceConfig& config, int run);

/// `runs` independent runs seeded seed, seed + 1, ...; a failing run is
/// recorded with its error and excluded from the means.
ReproduceSummary reproduce_hawkes(const ReproduceConfig& config, std::ostream* progress = nullptr);

Json summary_to_json(const ReproduceSummary& summary);
/// Aligned mean (stderr) table in the layout of the TRE/DRE comparison.
void print_summary(std::ostream& out, const ReproduceSummary& summary);

}  // namespace gpattr
