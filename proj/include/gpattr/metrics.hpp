#pragma once

#include <span>
#include <string>
#include <vector>

#include "gpattr/catalog.hpp"
#include "gpattr/report.hpp"

namespace gpattr {

struct ChannelDistribution {
  std::vector<std::string> channels;
  std::vector<double> raw;          // aggregated scores (CAS) or counts (CCC)
  std::vector<double> proportions;  // raw / sum(raw)
  std::size_t conversions = 0;      // reports aggregated
  std::size_t skipped = 0;          // reports carrying an error

  /// Throws InvalidArgument when raw is empty, negative or all zero.
  static ChannelDistribution from_raw(std::vector<std::string> channels, std::vector<double> raw);
};

/// CAS_z: sum over conversions of the whole-channel score, normalised across
/// channels. Reports with an error are skipped and counted. When `method` is
/// nonempty only reports of that method are used.
ChannelDistribution aggregate_cas(std::span<const ConversionReport> reports, const EventCatalog& catalog,
                                  const std::string& method = {});

/// Same, with channels identified by name; reports naming other channels are an error.
ChannelDistribution aggregate_cas(std::span<const ConversionReport> reports, const std::vector<std::string>& channels,
                                  const std::string& method = {});

/// Same aggregate formed by summing touchpoint scores per channel.
ChannelDistribution aggregate_touchpoints(std::span<const ConversionReport> reports, const EventCatalog& catalog,
                                          const std::string& method = {});

/// sum p log(p / q), natural log; +infinity when q_z = 0 < p_z.
double kl_divergence(std::span<const double> p, std::span<const double> q);
/// sqrt(1/2 sum (sqrt q - sqrt p)^2), in [0, 1].
double hellinger(std::span<const double> p, std::span<const double> q);

}  // namespace gpattr
