#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gpattr/catalog.hpp"
#include "gpattr/model.hpp"

namespace fixtures {

using namespace gpattr;

// conv (0), search_imp (1, customer), disp_imp (2, firm).
inline EventCatalog figure3_catalog() {
  return EventCatalog({{"conv", Initiator::Customer, std::nullopt},
                       {"search_imp", Initiator::Customer, "search"},
                       {"disp_imp", Initiator::Firm, "display"}},
                      "conv");
}

inline Path figure3_path() { return Path{"b", 7.0, {{1.0, 1}, {3.0, 2}, {6.0, 1}, {7.0, 0}}}; }

inline ModelParams figure3_params() {
  ModelParams params(3, 2, Kernel(KernelShape::ExpDecay, 10.0));
  params.mu(0) = 0.01;
  params.alpha(1, 0) = 0.02;
  params.alpha(2, 0) = 0.01;
  return params;
}

// conv, then customer types c1..c{k}, then one firm type f: f -> c1 -> c2 -> ... -> ck -> conv.
struct Line {
  EventCatalog catalog;
  ModelParams params;
  Path path;
};

inline Line line_graph(int k) {
  std::vector<EventCatalog::TypeSpec> specs{{"conv", Initiator::Customer, std::nullopt}};
  for (int i = 1; i <= k; ++i) specs.push_back({"c" + std::to_string(i), Initiator::Customer, "ch"});
  specs.push_back({"f", Initiator::Firm, "ch"});
  EventCatalog catalog(specs, "conv");
  const int p = k + 2, q = k + 1;
  ModelParams params(p, q, Kernel(KernelShape::ExpDecay, 5.0));
  params.alpha(p - 1, 1) = 0.7;
  for (int i = 1; i < k; ++i) params.alpha(i, i + 1) = 0.6;
  params.alpha(k, 0) = 0.5;
  Path path{"line", 10.0 + k, {}};
  path.events.push_back({1.0, p - 1});
  for (int i = 1; i <= k; ++i) path.events.push_back({1.0 + i, i});
  path.events.push_back({2.0 + k, 0});
  return {catalog, params, path};
}

// Random customer/firm mix on a small catalog with dense excitation.
struct RandomCase {
  EventCatalog catalog;
  ModelParams params;
};

inline RandomCase random_case(std::mt19937_64& rng) {
  EventCatalog catalog({{"conv", Initiator::Customer, std::nullopt},
                        {"a", Initiator::Customer, "x"},
                        {"b", Initiator::Customer, "y"},
                        {"f", Initiator::Firm, "x"},
                        {"g", Initiator::Firm, "y"}},
                       "conv");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ModelParams params(5, 3, Kernel(KernelShape::ExpDecay, 2.0 + 8.0 * u(rng)));
  for (int e = 0; e < 3; ++e) params.mu(e) = 0.01 + 0.2 * u(rng);
  for (int s = 0; s < 5; ++s)
    for (int e = 0; e < 3; ++e) params.alpha(s, e) = u(rng) < 0.7 ? u(rng) : 0.0;
  return {catalog, params};
}

// m events at distinct random times, the last being a conversion.
inline Path random_path(std::mt19937_64& rng, int m, int num_types) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> type(0, num_types - 1);
  Path path{"r", 50.0, {}};
  double t = 0.0;
  for (int i = 0; i < m - 1; ++i) {
    t += 0.1 + 3.0 * u(rng);
    path.events.push_back({t, type(rng)});
  }
  path.events.push_back({t + 0.1 + 3.0 * u(rng), 0});
  path.horizon = path.events.back().t + 1.0;
  return path;
}

}  // namespace fixtures
