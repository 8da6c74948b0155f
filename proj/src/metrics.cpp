#include "gpattr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpattr/error.hpp"

namespace gpattr {

ChannelDistribution ChannelDistribution::from_raw(std::vector<std::string> channels, std::vector<double> raw) {
  if (raw.empty() || raw.size() != channels.size()) throw InvalidArgument("distribution needs one value per channel");
  double total = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("channel aggregates must be finite and nonnegative");
    total += v;
  }
  if (!(total > 0.0)) throw InvalidArgument("all channel aggregates are zero; proportions are undefined");
  ChannelDistribution d;
  d.channels = std::move(channels);
  d.proportions.reserve(raw.size());
  for (double v : raw) d.proportions.push_back(v / total);
  d.raw = std::move(raw);
  return d;
}

namespace {

std::size_t channel_position(const std::vector<std::string>& channels, const std::string& name) {
  const auto it = std::find(channels.begin(), channels.end(), name);
  if (it == channels.end()) throw InvalidArgument("report names unknown channel '" + name + "'");
  return static_cast<std::size_t>(it - channels.begin());
}

template <class Extract>
ChannelDistribution aggregate(std::span<const ConversionReport> reports, const std::vector<std::string>& channels,
                              const std::string& method, Extract&& extract) {
  std::vector<double> raw(channels.size(), 0.0);
  std::size_t used = 0, skipped = 0;
  for (const auto& r : reports) {
    if (!method.empty() && r.method != method) continue;
    if (r.error) {
      ++skipped;
      continue;
    }
    ++used;
    extract(r, raw);
  }
  if (used == 0) throw InvalidArgument("no scored conversions to aggregate");
  auto d = ChannelDistribution::from_raw(channels, std::move(raw));
  d.conversions = used;
  d.skipped = skipped;
  return d;
}

}  // namespace

ChannelDistribution aggregate_cas(std::span<const ConversionReport> reports, const std::vector<std::string>& channels,
                                  const std::string& method) {
  return aggregate(reports, channels, method, [&](const ConversionReport& r, std::vector<double>& raw) {
    for (const auto& [name, score] : r.channels) raw[channel_position(channels, name)] += score;
  });
}

ChannelDistribution aggregate_cas(std::span<const ConversionReport> reports, const EventCatalog& catalog,
                                  const std::string& method) {
  return aggregate_cas(reports, catalog.channel_names(), method);
}

ChannelDistribution aggregate_touchpoints(std::span<const ConversionReport> reports, const EventCatalog& catalog,
                                          const std::string& method) {
  const auto& channels = catalog.channel_names();
  return aggregate(reports, channels, method, [&](const ConversionReport& r, std::vector<double>& raw) {
    for (const auto& tp : r.touchpoints)
      if (tp.channel) raw[channel_position(channels, *tp.channel)] += tp.score;
  });
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("distributions differ in length");
  double kl = 0.0;
  for (std::size_t z = 0; z < p.size(); ++z) {
    if (p[z] <= 0.0) continue;
    if (q[z] <= 0.0) return std::numeric_limits<double>::infinity();
    kl += p[z] * std::log(p[z] / q[z]);
  }
  return std::max(kl, 0.0);
}

double hellinger(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("distributions differ in length");
  double s = 0.0;
  for (std::size_t z = 0; z < p.size(); ++z) {
    const double d = std::sqrt(std::max(q[z], 0.0)) - std::sqrt(std::max(p[z], 0.0));
    s += d * d;
  }
  return std::min(1.0, std::sqrt(0.5 * s));
}

}  // namespace gpattr
