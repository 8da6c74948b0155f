#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gpattr/baselines.hpp"
#include "gpattr/error.hpp"
#include "gpattr/estimation.hpp"
#include "gpattr/experiment.hpp"
#include "gpattr/io.hpp"
#include "gpattr/metrics.hpp"
#include "gpattr/report.hpp"
#include "gpattr/simulator.hpp"

using namespace gpattr;

namespace {

// Left-aligned text table.
class Table {
 public:
  explicit Table(std::vector<std::string> header) { rows_.push_back(std::move(header)); }
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  void print(std::ostream& out) const {
    std::vector<std::size_t> width;
    for (const auto& row : rows_) {
      width.resize(std::max(width.size(), row.size()), 0);
      for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    for (const auto& row : rows_) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        line += row[c];
        if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
      }
      out << line << '\n';
    }
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt(double v, int digits = 4) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Sources {
  std::string scenario;
  std::string catalog;

  void add_to(CLI::App* app) {
    app->add_option("--catalog", catalog, "Catalog JSON");
    app->add_option("--scenario", scenario, "Scenario JSON (its catalog is used)");
  }

  EventCatalog load() const {
    if (!catalog.empty()) return read_catalog_file(catalog);
    if (!scenario.empty()) return scenario_from_json(read_json_file(scenario)).catalog;
    throw InvalidArgument("pass --catalog or --scenario");
  }
};

void write_text(const std::string& filename, const std::string& text) {
  std::ofstream out(filename);
  if (!out) throw Error("cannot write '" + filename + "'");
  out << text;
}

template <class Fn>
void write_lines(const std::string& filename, Fn&& fn) {
  std::ofstream out(filename);
  if (!out) throw Error("cannot write '" + filename + "'");
  fn(out);
}

void print_distribution(const std::string& label, const ChannelDistribution& d) {
  std::vector<std::string> header{label};
  std::vector<std::string> row{"proportion"}, raw{"aggregate"};
  for (std::size_t z = 0; z < d.channels.size(); ++z) {
    header.push_back(d.channels[z]);
    row.push_back(fmt(d.proportions[z]));
    raw.push_back(fmt_g(d.raw[z]));
  }
  Table t(header);
  t.add(row);
  t.add(raw);
  t.print(std::cout);
}

GammaRule parse_rule(const std::string& name) {
  if (name == "min" || name == "min-loss") return GammaRule::MinLoss;
  if (name == "one-se" || name == "1se") return GammaRule::OneStdError;
  throw InvalidArgument("gamma rule must be min-loss or one-se");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphical point-process attribution: simulate, fit, attribute, evaluate"};
  app.require_subcommand(1);
  unsigned threads = 0;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate paths from a scenario");
  std::string sim_scenario, sim_out, sim_truth;
  std::vector<std::string> sim_disable;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::size_t> sim_n;
  sim->add_option("--scenario", sim_scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "Output paths JSONL")->required();
  sim->add_option("--disable", sim_disable, "Channel to switch off (repeatable)");
  sim->add_option("--truth", sim_truth, "Also write ground-truth CCC JSON (coupled channel-off runs)");
  sim->add_option("--seed", sim_seed, "Override the scenario seed");
  sim->add_option("--n-paths", sim_n, "Override the number of paths");
  sim->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit baselines and Granger coefficients");
  Sources fit_src;
  fit_src.add_to(fit);
  std::string fit_paths, fit_out, fit_diag, fit_gamma = "cv", fit_rule = "one-se", fit_shape = "exp";
  double fit_t0 = 10.0;
  int fit_folds = 5;
  bool fit_refit = true;
  fit->add_option("--paths", fit_paths, "Paths JSONL")->required()->check(CLI::ExistingFile);
  fit->add_option("--out", fit_out, "Output model JSON")->required();
  fit->add_option("--diagnostics", fit_diag, "Diagnostics JSON (default: <out>.diagnostics.json)");
  fit->add_option("--gamma", fit_gamma, "Regularization: a number, or 'cv' for cross-validation")->capture_default_str();
  fit->add_option("--gamma-rule", fit_rule, "CV rule: min-loss or one-se")->capture_default_str();
  fit->add_option("--folds", fit_folds, "CV folds")->capture_default_str();
  fit->add_flag("--refit,!--no-refit", fit_refit, "Unpenalised refit on the selected support");
  fit->add_option("--kernel", fit_shape, "Kernel shape: exp, boxcar, half_gaussian")->capture_default_str();
  fit->add_option("--t0", fit_t0, "Kernel scale T0 (days)")->capture_default_str();
  fit->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // attribute
  auto* att = app.add_subcommand("attribute", "Score conversions with a fitted model");
  Sources att_src;
  att_src.add_to(att);
  std::string att_model, att_paths, att_out, att_method = "tre", att_gran = "channel";
  att->add_option("--model", att_model, "Model JSON")->required()->check(CLI::ExistingFile);
  att->add_option("--paths", att_paths, "Paths JSONL")->required()->check(CLI::ExistingFile);
  att->add_option("--out", att_out, "Output report JSONL")->required();
  att->add_option("--method", att_method, "dre or tre")->capture_default_str();
  att->add_option("--granularity", att_gran, "touchpoint or channel")->capture_default_str();
  att->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // baselines
  auto* base = app.add_subcommand("baselines", "Score conversions with a reference method");
  Sources base_src;
  base_src.add_to(base);
  std::string base_paths, base_out, base_method;
  double half_life = 7.0;
  base->add_option("--method", base_method, "last, first, linear, decay, u_shaped, logistic, markov")->required();
  base->add_option("--paths", base_paths, "Paths JSONL")->required()->check(CLI::ExistingFile);
  base->add_option("--out", base_out, "Output report JSONL")->required();
  base->add_option("--half-life", half_life, "Decay half-life (days)")->capture_default_str();
  base->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Compare aggregated scores with ground truth");
  std::string eval_truth, eval_out;
  std::vector<std::string> eval_scores;
  eval->add_option("--truth", eval_truth, "Ground-truth CCC JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--scores", eval_scores, "Report JSONL (repeatable)")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Output metrics JSON");

  // reproduce
  auto* rep = app.add_subcommand("reproduce", "Two-channel Hawkes study: TRE vs DRE against ground truth");
  ReproduceConfig rc;
  std::string rep_out, rep_rule = "one-se";
  std::optional<double> rep_gamma;
  bool rep_refit = true;
  rep->add_option("--runs", rc.runs, "Independent runs")->capture_default_str();
  rep->add_option("--seed", rc.seed, "Seed of the first run; run r uses seed + r")->capture_default_str();
  rep->add_option("--n-paths", rc.n_paths, "Paths per run")->capture_default_str();
  rep->add_option("--horizon", rc.horizon, "Horizon T (days)")->capture_default_str();
  rep->add_option("--gamma", rep_gamma, "Fixed regularization (skips cross-validation)");
  rep->add_option("--gamma-rule", rep_rule, "CV rule: min-loss or one-se")->capture_default_str();
  rep->add_flag("--refit,!--no-refit", rep_refit, "Unpenalised refit on the selected support");
  rep->add_option("--out", rep_out, "Summary JSON");
  rep->add_option("--threads", threads, "Worker threads (0 = all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      Scenario sc = scenario_from_json(read_json_file(sim_scenario));
      if (sim_seed) sc.seed = *sim_seed;
      if (sim_n) sc.n_paths = *sim_n;
      sc.validate();
      TypeSet disabled(sc.catalog.num_types());
      for (const auto& name : sim_disable)
        for (TypeIndex e : sc.catalog.channel_types(sc.catalog.channel_index(name))) disabled.insert(e);
      const auto paths = simulate(sc, disabled, threads);
      write_lines(sim_out, [&](std::ostream& out) { write_paths(out, paths, sc.catalog); });

      std::vector<std::size_t> counts(static_cast<std::size_t>(sc.catalog.num_types()), 0);
      for (const auto& p : paths)
        for (const auto& ev : p.events) ++counts[static_cast<std::size_t>(ev.type)];
      Table t({"type", "initiator", "channel", "events", "per path"});
      for (TypeIndex e = 0; e < sc.catalog.num_types(); ++e) {
        const auto z = sc.catalog.channel_of(e);
        t.add({sc.catalog.type_name(e), sc.catalog.is_customer(e) ? "customer" : "firm",
               z ? sc.catalog.channel_name(*z) : "-", std::to_string(counts[static_cast<std::size_t>(e)]),
               fmt(static_cast<double>(counts[static_cast<std::size_t>(e)]) / static_cast<double>(paths.size()))});
      }
      t.print(std::cout);
      if (!sim_truth.empty()) {
        if (!sim_disable.empty()) throw InvalidArgument("--truth needs the full scenario; drop --disable");
        const auto truth = ground_truth(sc, threads, &paths);
        write_json_file(sim_truth, ground_truth_to_json(truth));
        Table g({"channel", "conversions off", "CCC", "proportion"});
        for (std::size_t z = 0; z < truth.channels.size(); ++z)
          g.add({truth.channels[z], std::to_string(truth.conversions_off[z]), fmt(truth.ccc[z], 0),
                 fmt(truth.proportions[z])});
        std::cout << "\ntotal conversions " << truth.total_conversions << '\n';
        g.print(std::cout);
      }
      return 0;
    }

    if (*fit) {
      const auto catalog = fit_src.load();
      const auto paths = read_paths_file(fit_paths, catalog);
      const KernelTable kernels(catalog.num_types(), catalog.num_customer(),
                                Kernel(parse_kernel_shape(fit_shape), fit_t0));
      FitConfig cfg;
      cfg.threads = threads;
      cfg.refit = fit_refit;
      std::optional<GammaSelection> selection;
      if (fit_gamma == "cv") {
        GammaSearch search{default_relative_grid(), true, fit_folds, parse_rule(fit_rule)};
        selection = select_gamma(paths, catalog, kernels, search, cfg);
        cfg.gamma = selection->gamma;
      } else {
        cfg.gamma = {std::stod(fit_gamma)};
        cfg.refit = false;
      }
      const auto result = fit_all(paths, catalog, kernels, cfg);
      write_json_file(fit_out, model_to_json(result.params, catalog));

      Json nodes = Json::array();
      for (const auto& n : result.nodes) {
        nodes.push_back({{"target", catalog.type_name(n.target)},
                         {"gamma", n.gamma},
                         {"iterations", n.iterations},
                         {"primal_residual", n.primal_residual},
                         {"dual_residual", n.dual_residual},
                         {"objective", n.objective},
                         {"converged", n.converged}});
      }
      Json diag{{"paths", paths.size()}, {"refit", cfg.refit}, {"nodes", nodes}};
      if (selection) {
        diag["cv"] = {{"rule", fit_rule}, {"folds", fit_folds}, {"grid", selection->grid},
                      {"loss", selection->cv_loss}, {"se", selection->cv_se}, {"warnings", selection->warnings}};
        for (const auto& w : selection->warnings) std::cerr << "warning: " << w << '\n';
      }
      write_json_file(fit_diag.empty() ? fit_out + ".diagnostics.json" : fit_diag, diag);

      const auto graph = extract_graph(result.params);
      Table t({"target", "mu", "gamma", "iterations", "converged", "parents"});
      for (const auto& n : result.nodes) {
        std::string parents;
        for (TypeIndex s : graph.parents(n.target)) {
          if (!parents.empty()) parents += ", ";
          parents += catalog.type_name(s) + " " + fmt(result.params.alpha(s, n.target));
        }
        t.add({catalog.type_name(n.target), fmt_g(result.params.mu(n.target)), fmt_g(n.gamma),
               std::to_string(n.iterations), n.converged ? "yes" : "NO", parents.empty() ? "-" : parents});
      }
      t.print(std::cout);
      return result.converged() ? 0 : 1;
    }

    if (*att) {
      const auto catalog = att_src.load();
      const auto params = read_model_file(att_model, catalog);
      const auto paths = read_paths_file(att_paths, catalog);
      ScoreMethod method;
      if (att_method == "dre")
        method = ScoreMethod::Dre;
      else if (att_method == "tre")
        method = ScoreMethod::TreBackprop;
      else
        throw InvalidArgument("method must be dre or tre");
      const auto reports = score_paths(paths, params, catalog, method, parse_granularity(att_gran), threads);
      write_lines(att_out, [&](std::ostream& out) { write_reports(out, reports); });
      std::size_t errors = 0;
      for (const auto& r : reports) errors += r.error ? 1 : 0;
      std::cout << reports.size() << " conversions scored, " << errors << " errors\n";
      if (reports.size() > errors) print_distribution(att_method, aggregate_cas(reports, catalog));
      return errors == 0 ? 0 : 1;
    }

    if (*base) {
      const auto catalog = base_src.load();
      const auto paths = read_paths_file(base_paths, catalog);
      const auto run = score_baseline(paths, catalog, BaselineSpec{parse_baseline_method(base_method), half_life},
                                      threads);
      for (const auto& w : run.warnings) std::cerr << "warning: " << w << '\n';
      write_lines(base_out, [&](std::ostream& out) { write_reports(out, run.reports); });
      std::cout << run.reports.size() << " conversions scored\n";
      print_distribution(base_method, aggregate_cas(run.reports, catalog));
      return 0;
    }

    if (*eval) {
      const auto truth = ground_truth_from_json(read_json_file(eval_truth));
      std::map<std::string, std::vector<ConversionReport>> by_method;
      for (const auto& file : eval_scores)
        for (auto& r : read_reports_file(file)) by_method[r.method].push_back(std::move(r));
      Json methods = Json::object();
      std::vector<std::string> header{"method"};
      for (const auto& c : truth.channels) header.push_back(c);
      header.insert(header.end(), {"KL", "Hellinger", "conversions"});
      Table t(header);
      std::vector<std::string> truth_row{"ground truth"};
      for (double p : truth.proportions) truth_row.push_back(fmt(p));
      t.add(truth_row);
      for (const auto& [name, reports] : by_method) {
        const auto d = aggregate_cas(reports, truth.channels, name);
        const double kl = kl_divergence(truth.proportions, d.proportions);
        const double h = hellinger(truth.proportions, d.proportions);
        methods[name] = {{"proportions", d.proportions},
                         {"aggregate", d.raw},
                         {"kl", std::isfinite(kl) ? Json(kl) : Json("inf")},
                         {"hellinger", h},
                         {"conversions", d.conversions},
                         {"skipped", d.skipped}};
        std::vector<std::string> row{name};
        for (double p : d.proportions) row.push_back(fmt(p));
        row.insert(row.end(), {fmt(kl, 5), fmt(h, 5), std::to_string(d.conversions)});
        t.add(row);
      }
      t.print(std::cout);
      if (!eval_out.empty())
        write_json_file(eval_out, Json{{"channels", truth.channels}, {"truth", truth.proportions}, {"methods", methods}});
      return 0;
    }

    if (*rep) {
      rc.threads = threads;
      rc.search.rule = parse_rule(rep_rule);
      rc.fixed_gamma = rep_gamma;
      rc.refit = rep_refit;
      const auto summary = reproduce_hawkes(rc, &std::cerr);
      print_summary(std::cout, summary);
      if (!rep_out.empty()) write_json_file(rep_out, summary_to_json(summary));
      return summary.succeeded == summary.runs.size() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
