#include "gpattr/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "gpattr/error.hpp"

namespace gpattr {
namespace {

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(0, std::string("missing field '") + key + "'");
  return j.at(key);
}

double require_number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) throw ParseError(0, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Kernel kernel_from_json(const Json& j) {
  const Json& shape = require(j, "shape");
  if (!shape.is_string()) throw ParseError(0, "kernel shape must be a string");
  return Kernel(parse_kernel_shape(shape.get<std::string>()), require_number(j, "T0"));
}

Json kernel_to_json(const Kernel& k) { return Json{{"shape", std::string(to_string(k.shape()))}, {"T0", k.scale()}}; }

std::vector<TypeIndex> resolve_names(const Json& j, const char* key, const EventCatalog& catalog,
                                     std::vector<TypeIndex> fallback) {
  if (!j.contains(key)) return fallback;
  std::vector<TypeIndex> out;
  for (const auto& name : j.at(key)) out.push_back(catalog.type_index(name.get<std::string>()));
  if (out.size() != fallback.size())
    throw ParseError(0, std::string("'") + key + "' must list " + std::to_string(fallback.size()) + " types");
  auto sorted = out;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != fallback) throw ParseError(0, std::string("'") + key + "' must be a permutation of the expected types");
  return out;
}

}  // namespace

namespace {

EventCatalog parse_catalog(const Json& j) {
  std::vector<EventCatalog::TypeSpec> specs;
  for (const auto& t : require(j, "types")) {
    EventCatalog::TypeSpec spec;
    spec.name = require(t, "name").get<std::string>();
    const auto init = require(t, "initiator").get<std::string>();
    if (init == "customer") {
      spec.initiator = Initiator::Customer;
    } else if (init == "firm") {
      spec.initiator = Initiator::Firm;
    } else {
      throw ParseError(0, "initiator must be \"customer\" or \"firm\", got \"" + init + "\"");
    }
    if (t.contains("channel") && !t.at("channel").is_null()) spec.channel = t.at("channel").get<std::string>();
    specs.push_back(std::move(spec));
  }
  return EventCatalog(specs, require(j, "conversion").get<std::string>());
}

}  // namespace

EventCatalog catalog_from_json(const Json& j) {
  try {
    return parse_catalog(j);
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("catalog: ") + e.what());
  }
}

Json catalog_to_json(const EventCatalog& catalog) {
  Json types = Json::array();
  for (const auto& spec : catalog.specs()) {
    types.push_back({{"name", spec.name},
                     {"initiator", spec.initiator == Initiator::Customer ? "customer" : "firm"},
                     {"channel", spec.channel ? Json(*spec.channel) : Json(nullptr)}});
  }
  return Json{{"types", types}, {"conversion", catalog.type_name(EventCatalog::conversion())}};
}

EventCatalog read_catalog_file(const std::string& filename) { return catalog_from_json(read_json_file(filename)); }

Path path_from_json(const Json& j, const EventCatalog& catalog) {
  Path path;
  const Json& id = require(j, "path_id");
  path.id = id.is_string() ? id.get<std::string>() : id.dump();
  path.horizon = require_number(j, "T");
  if (!(path.horizon > 0.0) || !std::isfinite(path.horizon)) throw ParseError(0, "T must be positive and finite");
  for (const auto& ev : require(j, "events")) {
    const double t = require_number(ev, "t");
    const Json& e = require(ev, "e");
    if (!e.is_string()) throw ParseError(0, "event type 'e' must be a string");
    auto type = catalog.find_type(e.get<std::string>());
    if (!type) throw ParseError(0, "unknown event type '" + e.get<std::string>() + "'");
    if (!(t >= 0.0) || !std::isfinite(t)) throw ParseError(0, "event time must be finite and nonnegative");
    if (t > path.horizon) throw ParseError(0, "event time " + std::to_string(t) + " exceeds T");
    path.events.push_back({t, *type});
  }
  std::stable_sort(path.events.begin(), path.events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
  for (std::size_t i = 1; i < path.events.size(); ++i)
    if (path.events[i].t == path.events[i - 1].t)
      throw ParseError(0, "duplicate timestamp " + std::to_string(path.events[i].t) + " in path '" + path.id + "'");
  return path;
}

Json path_to_json(const Path& path, const EventCatalog& catalog) {
  Json events = Json::array();
  for (const auto& ev : path.events) events.push_back({{"t", ev.t}, {"e", catalog.type_name(ev.type)}});
  return Json{{"path_id", path.id}, {"T", path.horizon}, {"events", events}};
}

std::vector<Path> load_paths(std::istream& in, const EventCatalog& catalog) {
  std::vector<Path> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    try {
      out.push_back(path_from_json(Json::parse(line), catalog));
    } catch (const Json::exception& e) {
      throw ParseError(lineno, std::string("malformed JSON: ") + e.what());
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.what());
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

std::vector<Path> read_paths_file(const std::string& filename, const EventCatalog& catalog) {
  std::ifstream in(filename);
  if (!in) throw Error("cannot open '" + filename + "'");
  return load_paths(in, catalog);
}

void write_paths(std::ostream& out, const std::vector<Path>& paths, const EventCatalog& catalog) {
  for (const auto& p : paths) out << path_to_json(p, catalog).dump() << '\n';
}

namespace {

ModelParams parse_model(const Json& j, const EventCatalog& catalog) {
  const int p = catalog.num_types();
  const int q = catalog.num_customer();
  KernelTable table(p, q, kernel_from_json(require(j, "kernel")));

  std::vector<TypeIndex> all(static_cast<std::size_t>(p)), customer(static_cast<std::size_t>(q));
  for (int i = 0; i < p; ++i) all[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < q; ++i) customer[static_cast<std::size_t>(i)] = i;
  const auto rows = resolve_names(j, "types", catalog, all);
  const auto cols = resolve_names(j, "targets", catalog, customer);

  if (j.contains("kernels")) {
    const Json& grid = j.at("kernels");
    if (grid.size() != static_cast<std::size_t>(p)) throw ParseError(0, "'kernels' must have p rows");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (grid[r].size() != static_cast<std::size_t>(q)) throw ParseError(0, "'kernels' rows must have q entries");
      for (std::size_t c = 0; c < cols.size(); ++c) table.set(rows[r], cols[c], kernel_from_json(grid[r][c]));
    }
  }

  ModelParams params(std::move(table));
  const Json& mu = require(j, "mu");
  if (mu.size() != static_cast<std::size_t>(q)) throw ParseError(0, "'mu' must have q entries");
  for (std::size_t c = 0; c < cols.size(); ++c) params.mu(cols[c]) = mu[c].get<double>();
  const Json& alpha = require(j, "alpha");
  if (alpha.size() != static_cast<std::size_t>(p)) throw ParseError(0, "'alpha' must have p rows");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (alpha[r].size() != static_cast<std::size_t>(q)) throw ParseError(0, "'alpha' rows must have q entries");
    for (std::size_t c = 0; c < cols.size(); ++c) params.alpha(rows[r], cols[c]) = alpha[r][c].get<double>();
  }
  params.validate();
  return params;
}

}  // namespace

ModelParams model_from_json(const Json& j, const EventCatalog& catalog) {
  try {
    return parse_model(j, catalog);
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("model: ") + e.what());
  }
}

Json model_to_json(const ModelParams& params, const EventCatalog& catalog) {
  const int p = params.num_types();
  const int q = params.num_customer();
  Json types = Json::array(), targets = Json::array(), mu = Json::array(), alpha = Json::array();
  for (int e = 0; e < p; ++e) types.push_back(catalog.type_name(e));
  for (int e = 0; e < q; ++e) {
    targets.push_back(catalog.type_name(e));
    mu.push_back(params.mu(e));
  }
  for (int r = 0; r < p; ++r) {
    Json row = Json::array();
    for (int c = 0; c < q; ++c) row.push_back(params.alpha(r, c));
    alpha.push_back(row);
  }
  Json out{{"types", types}, {"targets", targets}, {"mu", mu}, {"alpha", alpha},
           {"kernel", kernel_to_json(params.kernels(0, 0))}};
  if (!params.kernels.uniform()) {
    Json grid = Json::array();
    for (int r = 0; r < p; ++r) {
      Json row = Json::array();
      for (int c = 0; c < q; ++c) row.push_back(kernel_to_json(params.kernels(r, c)));
      grid.push_back(row);
    }
    out["kernels"] = grid;
  }
  return out;
}

ModelParams read_model_file(const std::string& filename, const EventCatalog& catalog) {
  return model_from_json(read_json_file(filename), catalog);
}

Json read_json_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw Error("cannot open '" + filename + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(0, filename + ": " + e.what());
  }
}

void write_json_file(const std::string& filename, const Json& j) {
  std::ofstream out(filename);
  if (!out) throw Error("cannot write '" + filename + "'");
  out << j.dump(2) << '\n';
}

}  // namespace gpattr
