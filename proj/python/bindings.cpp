// Python bindings: every structured value crosses the boundary as a JSON string.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "gpattr/baselines.hpp"
#include "gpattr/error.hpp"
#include "gpattr/estimation.hpp"
#include "gpattr/experiment.hpp"
#include "gpattr/io.hpp"
#include "gpattr/metrics.hpp"
#include "gpattr/report.hpp"
#include "gpattr/simulator.hpp"

namespace py = pybind11;
using namespace gpattr;

namespace {

EventCatalog catalog_arg(const std::string& text) {
  const Json j = Json::parse(text);
  return j.contains("catalog") ? scenario_from_json(j).catalog : catalog_from_json(j);
}

std::vector<Path> paths_arg(const std::string& text, const EventCatalog& catalog) {
  std::istringstream in(text);
  return load_paths(in, catalog);
}

std::string paths_out(const std::vector<Path>& paths, const EventCatalog& catalog) {
  std::ostringstream out;
  write_paths(out, paths, catalog);
  return out.str();
}

std::string reports_out(const std::vector<ConversionReport>& reports) {
  std::ostringstream out;
  write_reports(out, reports);
  return out.str();
}

GammaRule rule_arg(const std::string& name) {
  if (name == "min-loss") return GammaRule::MinLoss;
  if (name == "one-se") return GammaRule::OneStdError;
  throw InvalidArgument("gamma rule must be min-loss or one-se");
}

std::string simulate_py(const std::string& scenario_text, std::optional<std::size_t> n_paths,
                        std::optional<std::uint64_t> seed, const std::vector<std::string>& disable, unsigned threads) {
  Scenario sc = scenario_from_json(Json::parse(scenario_text));
  if (n_paths) sc.n_paths = *n_paths;
  if (seed) sc.seed = *seed;
  TypeSet disabled(sc.catalog.num_types());
  for (const auto& name : disable)
    for (TypeIndex e : sc.catalog.channel_types(sc.catalog.channel_index(name))) disabled.insert(e);
  py::gil_scoped_release release;
  return paths_out(simulate(sc, disabled, threads), sc.catalog);
}

std::string ground_truth_py(const std::string& scenario_text, std::optional<std::size_t> n_paths,
                            std::optional<std::uint64_t> seed, unsigned threads) {
  Scenario sc = scenario_from_json(Json::parse(scenario_text));
  if (n_paths) sc.n_paths = *n_paths;
  if (seed) sc.seed = *seed;
  py::gil_scoped_release release;
  return ground_truth_to_json(ground_truth(sc, threads)).dump();
}

std::string fit_py(const std::string& catalog_text, const std::string& paths_text, std::optional<double> gamma,
                   const std::string& rule, int folds, bool refit, const std::string& kernel, double t0,
                   unsigned threads) {
  const auto catalog = catalog_arg(catalog_text);
  const auto paths = paths_arg(paths_text, catalog);
  py::gil_scoped_release release;
  const KernelTable kernels(catalog.num_types(), catalog.num_customer(), Kernel(parse_kernel_shape(kernel), t0));
  FitConfig cfg;
  cfg.threads = threads;
  if (gamma) {
    cfg.gamma = {*gamma};
  } else {
    cfg.refit = refit;
    cfg.gamma = select_gamma(paths, catalog, kernels, GammaSearch{default_relative_grid(), true, folds, rule_arg(rule)},
                             cfg)
                    .gamma;
  }
  return model_to_json(fit_all(paths, catalog, kernels, cfg).params, catalog).dump();
}

std::string attribute_py(const std::string& catalog_text, const std::string& model_text, const std::string& paths_text,
                         const std::string& method, const std::string& granularity, unsigned threads) {
  const auto catalog = catalog_arg(catalog_text);
  const auto params = model_from_json(Json::parse(model_text), catalog);
  const auto paths = paths_arg(paths_text, catalog);
  ScoreMethod m;
  if (method == "dre")
    m = ScoreMethod::Dre;
  else if (method == "tre")
    m = ScoreMethod::TreBackprop;
  else
    throw InvalidArgument("method must be dre or tre");
  const auto g = parse_granularity(granularity);
  py::gil_scoped_release release;
  return reports_out(score_paths(paths, params, catalog, m, g, threads));
}

std::string baselines_py(const std::string& catalog_text, const std::string& paths_text, const std::string& method,
                         double half_life, unsigned threads) {
  const auto catalog = catalog_arg(catalog_text);
  const auto paths = paths_arg(paths_text, catalog);
  const BaselineSpec spec{parse_baseline_method(method), half_life};
  py::gil_scoped_release release;
  return reports_out(score_baseline(paths, catalog, spec, threads).reports);
}

std::string evaluate_py(const std::string& truth_text, const std::string& reports_text) {
  const auto truth = ground_truth_from_json(Json::parse(truth_text));
  std::istringstream in(reports_text);
  const auto reports = load_reports(in);
  const auto d = aggregate_cas(reports, truth.channels);
  Json out{{"channels", d.channels},
           {"proportions", d.proportions},
           {"truth", truth.proportions},
           {"conversions", d.conversions},
           {"skipped", d.skipped},
           {"kl", kl_divergence(truth.proportions, d.proportions)},
           {"hellinger", hellinger(truth.proportions, d.proportions)}};
  return out.dump();
}

std::string reproduce_py(int runs, std::uint64_t seed, std::size_t n_paths, double horizon, const std::string& rule,
                         bool refit, unsigned threads) {
  ReproduceConfig cfg;
  cfg.runs = runs;
  cfg.seed = seed;
  cfg.n_paths = n_paths;
  cfg.horizon = horizon;
  cfg.threads = threads;
  cfg.search.rule = rule_arg(rule);
  cfg.refit = refit;
  py::gil_scoped_release release;
  return summary_to_json(reproduce_hawkes(cfg)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Hawkes-process multi-touch attribution core";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  m.def("simulate", &simulate_py, py::arg("scenario"), py::arg("n_paths") = py::none(), py::arg("seed") = py::none(),
        py::arg("disable") = std::vector<std::string>{}, py::arg("threads") = 1);
  m.def("ground_truth", &ground_truth_py, py::arg("scenario"), py::arg("n_paths") = py::none(),
        py::arg("seed") = py::none(), py::arg("threads") = 1);
  m.def("fit", &fit_py, py::arg("catalog"), py::arg("paths"), py::arg("gamma") = py::none(),
        py::arg("rule") = "one-se", py::arg("folds") = 5, py::arg("refit") = true, py::arg("kernel") = "exp",
        py::arg("t0") = 10.0, py::arg("threads") = 1);
  m.def("attribute", &attribute_py, py::arg("catalog"), py::arg("model"), py::arg("paths"), py::arg("method") = "tre",
        py::arg("granularity") = "channel", py::arg("threads") = 1);
  m.def("baselines", &baselines_py, py::arg("catalog"), py::arg("paths"), py::arg("method"),
        py::arg("half_life") = 7.0, py::arg("threads") = 1);
  m.def("evaluate", &evaluate_py, py::arg("truth"), py::arg("reports"));
  m.def("kl_divergence", [](const std::vector<double>& p, const std::vector<double>& q) { return kl_divergence(p, q); });
  m.def("hellinger", [](const std::vector<double>& p, const std::vector<double>& q) { return hellinger(p, q); });
  m.def("reproduce", &reproduce_py, py::arg("runs") = 10, py::arg("seed") = 1, py::arg("n_paths") = 10000,
        py::arg("horizon") = 365.0, py::arg("rule") = "one-se", py::arg("refit") = true, py::arg("threads") = 0);
  m.def("hawkes_scenario",
        [](std::size_t n_paths, double horizon, std::uint64_t seed) {
          return scenario_to_json(hawkes_two_channel_scenario(n_paths, horizon, seed)).dump();
        },
        py::arg("n_paths") = 10000, py::arg("horizon") = 365.0, py::arg("seed") = 1);
}
