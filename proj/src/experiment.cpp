#include "gpattr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "gpattr/error.hpp"
#include "gpattr/metrics.hpp"
#include "gpattr/report.hpp"

namespace gpattr {

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

RunOutcome run_hawkes_once(const Scenario& sc, const ReproduceConfig& config, int run) {
  RunOutcome out;
  out.run = run;
  out.seed = sc.seed;
  const auto paths = simulate(sc, TypeSet(sc.catalog.num_types()), config.threads);
  const GroundTruth truth = ground_truth(sc, config.threads, &paths);
  out.truth = truth.proportions;

  FitConfig fit_config;
  fit_config.threads = config.threads;
  fit_config.refit = config.refit;
  if (config.fixed_gamma) {
    fit_config.gamma = {*config.fixed_gamma};
  } else {
    fit_config.gamma = select_gamma(paths, sc.catalog, sc.params.kernels, config.search, fit_config).gamma;
  }
  out.gamma = fit_config.gamma;
  const FitResult fit = fit_all(paths, sc.catalog, sc.params.kernels, fit_config);

  const GrangerGraph fitted = extract_graph(fit.params), actual = extract_graph(sc.params);
  for (const auto& edge : fitted.edges) out.false_edges += actual.contains(edge.first, edge.second) ? 0 : 1;
  for (const auto& edge : actual.edges) out.missed_edges += fitted.contains(edge.first, edge.second) ? 0 : 1;
  out.graph_recovered = out.false_edges == 0 && out.missed_edges == 0;
  out.param_error = std::max((fit.params.alpha - sc.params.alpha).lpNorm<Eigen::Infinity>(),
                             (fit.params.mu - sc.params.mu).lpNorm<Eigen::Infinity>());

  const auto tre = score_paths(paths, fit.params, sc.catalog, ScoreMethod::TreBackprop, Granularity::Channel,
                               config.threads);
  const auto dre = score_paths(paths, fit.params, sc.catalog, ScoreMethod::Dre, Granularity::Channel, config.threads);
  out.conversions = tre.size();
  out.tre = aggregate_cas(tre, sc.catalog).proportions;
  out.dre = aggregate_cas(dre, sc.catalog).proportions;
  out.tre_kl = kl_divergence(out.truth, out.tre);
  out.tre_hellinger = hellinger(out.truth, out.tre);
  out.dre_kl = kl_divergence(out.truth, out.dre);
  out.dre_hellinger = hellinger(out.truth, out.dre);
  return out;
}

ReproduceSummary reproduce_hawkes(const ReproduceConfig& config, std::ostream* progress) {
  if (config.runs < 1) throw InvalidArgument("runs must be at least 1");
  ReproduceSummary summary;
  const int z_count = hawkes_two_channel_scenario(1).catalog.num_channels();
  summary.channels = hawkes_two_channel_scenario(1).catalog.channel_names();
  std::vector<std::vector<double>> truth(z_count), tre(z_count), dre(z_count);
  std::vector<double> tre_kl, tre_h, dre_kl, dre_h;

  for (int r = 0; r < config.runs; ++r) {
    const Scenario sc = hawkes_two_channel_scenario(config.n_paths, config.horizon, config.seed + r);
    RunOutcome outcome;
    try {
      outcome = run_hawkes_once(sc, config, r);
    } catch (const std::exception& e) {
      outcome.run = r;
      outcome.seed = sc.seed;
      outcome.error = e.what();
    }
    if (progress) {
      *progress << "run " << r + 1 << "/" << config.runs;
      if (outcome.error)
        *progress << " failed: " << *outcome.error;
      else
        *progress << " seed " << outcome.seed << " conversions " << outcome.conversions << " KL(TRE) "
                  << outcome.tre_kl << " KL(DRE) " << outcome.dre_kl;
      *progress << '\n' << std::flush;
    }
    if (!outcome.error) {
      ++summary.succeeded;
      for (int z = 0; z < z_count; ++z) {
        truth[z].push_back(outcome.truth[z]);
        tre[z].push_back(outcome.tre[z]);
        dre[z].push_back(outcome.dre[z]);
      }
      tre_kl.push_back(outcome.tre_kl);
      tre_h.push_back(outcome.tre_hellinger);
      dre_kl.push_back(outcome.dre_kl);
      dre_h.push_back(outcome.dre_hellinger);
      summary.graphs_recovered += outcome.graph_recovered ? 1 : 0;
    }
    summary.runs.push_back(std::move(outcome));
  }

  for (int z = 0; z < z_count; ++z) {
    summary.truth.push_back(mean_se(truth[z]));
    summary.tre.push_back(mean_se(tre[z]));
    summary.dre.push_back(mean_se(dre[z]));
  }
  summary.tre_kl = mean_se(tre_kl);
  summary.tre_hellinger = mean_se(tre_h);
  summary.dre_kl = mean_se(dre_kl);
  summary.dre_hellinger = mean_se(dre_h);
  if (summary.succeeded > 0) {
    std::vector<double> p, t, d;
    for (int z = 0; z < z_count; ++z) {
      p.push_back(summary.truth[z].mean);
      t.push_back(summary.tre[z].mean);
      d.push_back(summary.dre[z].mean);
    }
    summary.tre_kl_of_means = kl_divergence(p, t);
    summary.tre_hellinger_of_means = hellinger(p, t);
    summary.dre_kl_of_means = kl_divergence(p, d);
    summary.dre_hellinger_of_means = hellinger(p, d);
  }
  return summary;
}

namespace {

Json mean_se_json(const MeanSe& m) { return Json{{"mean", m.mean}, {"se", m.se}}; }

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json summary_to_json(const ReproduceSummary& s) {
  Json runs = Json::array();
  for (const auto& r : s.runs) {
    Json j{{"run", r.run}, {"seed", r.seed}};
    if (r.error) {
      j["error"] = *r.error;
    } else {
      j.update(Json{{"conversions", r.conversions},
                    {"truth", r.truth},
                    {"tre", r.tre},
                    {"dre", r.dre},
                    {"tre_kl", finite_or_null(r.tre_kl)},
                    {"tre_hellinger", r.tre_hellinger},
                    {"dre_kl", finite_or_null(r.dre_kl)},
                    {"dre_hellinger", r.dre_hellinger},
                    {"graph_recovered", r.graph_recovered},
                    {"false_edges", r.false_edges},
                    {"missed_edges", r.missed_edges},
                    {"param_error", r.param_error},
                    {"gamma", r.gamma}});
    }
    runs.push_back(j);
  }
  Json per_channel = Json::object();
  for (std::size_t z = 0; z < s.channels.size(); ++z) {
    per_channel[s.channels[z]] = {{"truth", mean_se_json(s.truth[z])},
                                  {"tre", mean_se_json(s.tre[z])},
                                  {"dre", mean_se_json(s.dre[z])}};
  }
  return Json{{"runs", runs},
              {"succeeded", s.succeeded},
              {"proportions", per_channel},
              {"tre", {{"kl", mean_se_json(s.tre_kl)}, {"hellinger", mean_se_json(s.tre_hellinger)},
                       {"kl_of_means", finite_or_null(s.tre_kl_of_means)},
                       {"hellinger_of_means", s.tre_hellinger_of_means}}},
              {"dre", {{"kl", mean_se_json(s.dre_kl)}, {"hellinger", mean_se_json(s.dre_hellinger)},
                       {"kl_of_means", finite_or_null(s.dre_kl_of_means)},
                       {"hellinger_of_means", s.dre_hellinger_of_means}}},
              {"graphs_recovered", s.graphs_recovered}};
}

void print_summary(std::ostream& out, const ReproduceSummary& s) {
  auto cell = [](const MeanSe& m) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f (%.4f)", m.mean, m.se);
    return std::string(buf);
  };
  auto row = [&](const std::string& label, const std::vector<std::string>& cells) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%-14s", label.c_str());
    out << buf;
    for (const auto& c : cells) {
      std::snprintf(buf, sizeof buf, "  %-18s", c.c_str());
      out << buf;
    }
    out << '\n';
  };
  std::vector<std::string> header;
  for (const auto& c : s.channels) header.push_back(c);
  header.push_back("KL");
  header.push_back("Hellinger");
  row("", header);
  std::vector<std::string> truth, tre, dre;
  for (std::size_t z = 0; z < s.channels.size(); ++z) {
    truth.push_back(cell(s.truth[z]));
    tre.push_back(cell(s.tre[z]));
    dre.push_back(cell(s.dre[z]));
  }
  truth.insert(truth.end(), {"-", "-"});
  tre.insert(tre.end(), {cell(s.tre_kl), cell(s.tre_hellinger)});
  dre.insert(dre.end(), {cell(s.dre_kl), cell(s.dre_hellinger)});
  row("ground truth", truth);
  row("TRE", tre);
  row("DRE", dre);
  char buf[160];
  std::snprintf(buf, sizeof buf, "runs %zu/%zu succeeded; graph recovered in %d; on mean proportions KL TRE %.5f DRE %.5f\n",
                s.succeeded, s.runs.size(), s.graphs_recovered, s.tre_kl_of_means, s.dre_kl_of_means);
  out << buf;
}

}  // namespace gpattr
