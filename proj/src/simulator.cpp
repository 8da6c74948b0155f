#include "gpattr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "gpattr/error.hpp"
#include "gpattr/intensity.hpp"
#include "gpattr/parallel.hpp"
#include "gpattr/rng.hpp"

namespace gpattr {
namespace {

// Points of a unit-rate Poisson process on [0, T) x [lower, lower + height), sorted by time.
struct Band {
  std::vector<double> t;
  std::vector<double> u;
  std::size_t cursor = 0;
};

struct Candidate {
  double t;
  double u;
};

class PointSource {
 public:
  PointSource(const Scenario& sc, std::size_t path, TypeIndex type, double height)
      : sc_(sc), path_(path), type_(type), height_(height) {}

  // Earliest point with time > s and mark < bound, without consuming it.
  std::optional<Candidate> next(double s, double bound) {
    std::optional<Candidate> best;
    for (std::size_t k = 0; static_cast<double>(k) * height_ < bound; ++k) {
      Band& band = materialize(k);
      while (band.cursor < band.t.size() && band.t[band.cursor] <= s) ++band.cursor;
      for (std::size_t j = band.cursor; j < band.t.size(); ++j) {
        if (best && band.t[j] >= best->t) break;
        if (band.u[j] < bound) {
          best = Candidate{band.t[j], band.u[j]};
          break;
        }
      }
    }
    return best;
  }

 private:
  Band& materialize(std::size_t k) {
    while (bands_.size() <= k) {
      const std::size_t level = bands_.size();
      auto rng = make_stream(sc_.seed, path_, static_cast<std::uint64_t>(type_), StreamPurpose::ThinningBand, level);
      std::poisson_distribution<long> count(height_ * sc_.horizon);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const long n = count(rng);
      std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(n));
      for (auto& [t, u] : pts) {
        t = unit(rng) * sc_.horizon;
        u = (static_cast<double>(level) + unit(rng)) * height_;
      }
      std::sort(pts.begin(), pts.end());
      Band band;
      for (const auto& [t, u] : pts) {
        band.t.push_back(t);
        band.u.push_back(u);
      }
      bands_.push_back(std::move(band));
    }
    return bands_[k];
  }

  const Scenario& sc_;
  std::size_t path_;
  TypeIndex type_;
  double height_;
  std::vector<Band> bands_;
};

// Band height per customer type; depends only on the scenario so that
// coupled runs share the same point layout.
double band_height(const Scenario& sc, TypeIndex e) { return std::max(2.0 * sc.params.mu(e), 0.01); }

}  // namespace

void Scenario::validate() const {
  params.validate();
  if (params.num_types() != catalog.num_types() || params.num_customer() != catalog.num_customer())
    throw InvalidArgument("scenario model does not match its catalog");
  if (firm_rates.size() != static_cast<std::size_t>(catalog.num_types()))
    throw InvalidArgument("firm_rates must have one entry per type");
  for (double r : firm_rates)
    if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidArgument("firm rates must be finite and nonnegative");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon T must be positive");
  if (n_paths < 1) throw InvalidArgument("n_paths must be at least 1");
}

Path simulate_path(const Scenario& sc, std::size_t index, const TypeSet& disabled) {
  const int p = sc.catalog.num_types();
  const int q = sc.catalog.num_customer();
  Path path{std::to_string(index), sc.horizon, {}};

  std::vector<Event> firm;
  for (TypeIndex f = q; f < p; ++f) {
    const double rate = sc.firm_rates[static_cast<std::size_t>(f)];
    if (disabled.contains(f) || rate <= 0.0) continue;
    auto rng = make_stream(sc.seed, index, static_cast<std::uint64_t>(f), StreamPurpose::FirmArrivals);
    std::poisson_distribution<long> count(rate * sc.horizon);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long n = count(rng);
    for (long i = 0; i < n; ++i) firm.push_back({unit(rng) * sc.horizon, f});
  }
  std::sort(firm.begin(), firm.end(), [](const Event& a, const Event& b) { return a.t < b.t; });

  std::vector<PointSource> sources;
  for (TypeIndex e = 0; e < q; ++e) sources.emplace_back(sc, index, e, band_height(sc, e));

  std::size_t next_firm = 0;
  double s = 0.0;
  std::vector<double> bound(static_cast<std::size_t>(q));
  for (;;) {
    TypeIndex kind = -1;
    Candidate best{std::numeric_limits<double>::infinity(), 0.0};
    for (TypeIndex e = 0; e < q; ++e) {
      if (disabled.contains(e)) continue;
      const auto ue = static_cast<std::size_t>(e);
      bound[ue] = intensity_right_limit(path, sc.params, e, s);
      if (bound[ue] <= 0.0) continue;
      if (auto c = sources[ue].next(s, bound[ue]); c && c->t < best.t) {
        best = *c;
        kind = e;
      }
    }
    if (next_firm < firm.size() && firm[next_firm].t < best.t) {
      path.events.push_back(firm[next_firm++]);
      s = path.events.back().t;
      continue;
    }
    if (kind < 0 || best.t > sc.horizon) break;

    const double lambda = intensity(path, sc.params, kind, best.t);
    const double limit = bound[static_cast<std::size_t>(kind)];
    if (lambda > limit * (1.0 + 1e-9) + 1e-300)
      throw InvariantViolation("thinning bound exceeded for type " + sc.catalog.type_name(kind) + " at t=" +
                               std::to_string(best.t));
    if (best.u < lambda) path.events.push_back({best.t, kind});
    s = best.t;
  }
  return path;
}

std::vector<Path> simulate(const Scenario& sc, const TypeSet& disabled, unsigned threads) {
  sc.validate();
  std::vector<Path> out(sc.n_paths);
  parallel_for(sc.n_paths, threads, [&](std::size_t i) { out[i] = simulate_path(sc, i, disabled); });
  return out;
}

std::size_t count_conversions(const std::vector<Path>& paths) {
  std::size_t n = 0;
  for (const auto& p : paths) n += p.conversion_positions().size();
  return n;
}

ChannelCcc ground_truth_ccc(const Scenario& sc, ChannelIndex z, unsigned threads) {
  if (z < 0 || z >= sc.catalog.num_channels()) throw InvalidArgument("channel index out of range");
  ChannelCcc out;
  out.channel = z;
  out.total_conversions = count_conversions(simulate(sc, TypeSet(sc.catalog.num_types()), threads));
  out.conversions_off = count_conversions(simulate(sc, TypeSet::channel(sc.catalog, z), threads));
  out.ccc = static_cast<double>(out.total_conversions) - static_cast<double>(out.conversions_off);
  return out;
}

GroundTruth ground_truth(const Scenario& sc, unsigned threads, const std::vector<Path>* base) {
  GroundTruth g;
  g.channels = sc.catalog.channel_names();
  g.total_conversions =
      base ? count_conversions(*base) : count_conversions(simulate(sc, TypeSet(sc.catalog.num_types()), threads));
  double sum = 0.0;
  for (ChannelIndex z = 0; z < sc.catalog.num_channels(); ++z) {
    const std::size_t off = count_conversions(simulate(sc, TypeSet::channel(sc.catalog, z), threads));
    g.conversions_off.push_back(off);
    g.ccc.push_back(static_cast<double>(g.total_conversions) - static_cast<double>(off));
    sum += g.ccc.back();
  }
  for (double c : g.ccc) g.proportions.push_back(sum != 0.0 ? c / sum : 0.0);
  return g;
}

Json ground_truth_to_json(const GroundTruth& g) {
  return Json{{"channels", g.channels},     {"total_conversions", g.total_conversions},
              {"conversions_off", g.conversions_off}, {"ccc", g.ccc},
              {"proportions", g.proportions}};
}

GroundTruth ground_truth_from_json(const Json& j) {
  GroundTruth g;
  try {
    g.channels = j.at("channels").get<std::vector<std::string>>();
    g.ccc = j.at("ccc").get<std::vector<double>>();
    if (j.contains("total_conversions")) g.total_conversions = j.at("total_conversions").get<std::size_t>();
    if (j.contains("conversions_off")) g.conversions_off = j.at("conversions_off").get<std::vector<std::size_t>>();
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("ground truth: ") + e.what());
  }
  if (g.ccc.size() != g.channels.size()) throw ParseError(0, "ground truth: 'ccc' and 'channels' differ in length");
  double sum = 0.0;
  for (double c : g.ccc) sum += c;
  for (double c : g.ccc) g.proportions.push_back(sum != 0.0 ? c / sum : 0.0);
  return g;
}

Scenario scenario_from_json(const Json& j) {
  try {
    EventCatalog catalog = catalog_from_json(j.at("catalog"));
    ModelParams params = model_from_json(j.at("model"), catalog);
    std::vector<double> rates(static_cast<std::size_t>(catalog.num_types()), 0.0);
    if (j.contains("firm_rates")) {
      for (const auto& [name, rate] : j.at("firm_rates").items()) {
        const TypeIndex e = catalog.type_index(name);
        if (!catalog.is_firm(e)) throw ParseError(0, "firm_rates names customer-initiated type '" + name + "'");
        rates[static_cast<std::size_t>(e)] = rate.get<double>();
      }
    }
    Scenario sc{std::move(catalog), std::move(params), std::move(rates), j.at("T").get<double>(),
                j.at("n_paths").get<std::size_t>(), j.value("seed", std::uint64_t{0})};
    sc.validate();
    return sc;
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("scenario: ") + e.what());
  }
}

Json scenario_to_json(const Scenario& sc) {
  Json rates = Json::object();
  for (TypeIndex f = sc.catalog.num_customer(); f < sc.catalog.num_types(); ++f)
    rates[sc.catalog.type_name(f)] = sc.firm_rates[static_cast<std::size_t>(f)];
  return Json{{"catalog", catalog_to_json(sc.catalog)},
              {"model", model_to_json(sc.params, sc.catalog)},
              {"firm_rates", rates},
              {"T", sc.horizon},
              {"n_paths", sc.n_paths},
              {"seed", sc.seed}};
}

Scenario hawkes_two_channel_scenario(std::size_t n_paths, double horizon, std::uint64_t seed) {
  EventCatalog catalog({{"conv", Initiator::Customer, std::nullopt},
                        {"disp_imp", Initiator::Firm, "display"},
                        {"disp_click", Initiator::Customer, "display"},
                        {"search_imp", Initiator::Customer, "search"},
                        {"search_click", Initiator::Customer, "search"}},
                       "conv");
  const auto id = [&](const char* name) { return catalog.type_index(name); };
  ModelParams params(catalog.num_types(), catalog.num_customer(), Kernel(KernelShape::ExpDecay, 10.0));
  params.mu(id("search_imp")) = 0.02;
  params.mu(id("conv")) = 1e-4;
  params.alpha(id("disp_imp"), id("disp_click")) = 0.08;
  params.alpha(id("disp_imp"), id("search_imp")) = 0.08;
  params.alpha(id("disp_imp"), id("conv")) = 0.01;
  params.alpha(id("disp_click"), id("conv")) = 0.08;
  params.alpha(id("search_imp"), id("search_click")) = 0.08;
  params.alpha(id("search_imp"), id("conv")) = 0.02;
  params.alpha(id("search_click"), id("conv")) = 0.1;
  std::vector<double> rates(static_cast<std::size_t>(catalog.num_types()), 0.0);
  rates[static_cast<std::size_t>(id("disp_imp"))] = 0.02;
  return Scenario{std::move(catalog), std::move(params), std::move(rates), horizon, n_paths, seed};
}

}  // namespace gpattr
