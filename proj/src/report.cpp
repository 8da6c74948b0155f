#include "gpattr/report.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "gpattr/error.hpp"
#include "gpattr/parallel.hpp"

namespace gpattr {

Granularity parse_granularity(std::string_view name) {
  if (name == "touchpoint") return Granularity::Touchpoint;
  if (name == "channel") return Granularity::Channel;
  throw InvalidArgument("granularity must be touchpoint or channel, got '" + std::string(name) + "'");
}

Json report_to_json(const ConversionReport& r) {
  Json tps = Json::array();
  for (const auto& tp : r.touchpoints) {
    tps.push_back({{"index", tp.index},
                   {"t", tp.t},
                   {"e", tp.type},
                   {"channel", tp.channel ? Json(*tp.channel) : Json(nullptr)},
                   {"score", tp.score}});
  }
  Json out{{"path_id", r.path_id},
           {"conversion_index", r.conversion_index},
           {"conversion_time", r.conversion_time},
           {"method", r.method},
           {"baseline_effect", r.baseline_effect ? Json(*r.baseline_effect) : Json(nullptr)},
           {"touchpoints", tps},
           {"channels", r.channels}};
  if (r.error) out["error"] = *r.error;
  return out;
}

ConversionReport report_from_json(const Json& j) {
  ConversionReport r;
  r.path_id = j.at("path_id").get<std::string>();
  r.conversion_index = j.value("conversion_index", std::size_t{0});
  r.conversion_time = j.at("conversion_time").get<double>();
  r.method = j.value("method", std::string{});
  if (j.contains("baseline_effect") && !j.at("baseline_effect").is_null())
    r.baseline_effect = j.at("baseline_effect").get<double>();
  if (j.contains("touchpoints")) {
    for (const auto& tp : j.at("touchpoints")) {
      TouchpointScore s;
      s.index = tp.at("index").get<std::size_t>();
      s.t = tp.at("t").get<double>();
      s.type = tp.at("e").get<std::string>();
      if (tp.contains("channel") && !tp.at("channel").is_null()) s.channel = tp.at("channel").get<std::string>();
      s.score = tp.at("score").get<double>();
      r.touchpoints.push_back(std::move(s));
    }
  }
  if (j.contains("channels")) r.channels = j.at("channels").get<std::map<std::string, double>>();
  if (j.contains("error") && !j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  return r;
}

void write_reports(std::ostream& out, const std::vector<ConversionReport>& reports) {
  for (const auto& r : reports) out << report_to_json(r).dump() << '\n';
}

std::vector<ConversionReport> load_reports(std::istream& in) {
  std::vector<ConversionReport> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(report_from_json(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

std::vector<ConversionReport> read_reports_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw Error("cannot open '" + filename + "'");
  return load_reports(in);
}

namespace {

ConversionReport skeleton(const Path& path, std::size_t target, std::string method) {
  ConversionReport r;
  r.path_id = path.id;
  r.conversion_index = target;
  r.conversion_time = path.events[target].t;
  r.method = std::move(method);
  return r;
}

TouchpointScore touchpoint(const Path& path, const EventCatalog& catalog, std::size_t i, double score) {
  const TypeIndex e = path.events[i].type;
  TouchpointScore s{i, path.events[i].t, catalog.type_name(e), std::nullopt, score};
  if (const auto z = catalog.channel_of(e)) s.channel = catalog.channel_name(*z);
  return s;
}

std::vector<ConversionReport> score_path(const Path& path, const ModelParams& params, const EventCatalog& catalog,
                                         ScoreMethod method, Granularity granularity) {
  std::vector<ConversionReport> out;
  for (std::size_t target : path.conversion_positions()) {
    ConversionReport r = skeleton(path, target, std::string(to_string(method)));
    try {
      const ConversionContext ctx(path, params, target);
      ctx.require_defined();
      auto score = [&](const RemovalSet& removal) {
        if (removal.empty()) return 0.0;
        return method == ScoreMethod::Dre ? dre(ctx, removal) : tre_backprop(ctx, removal);
      };
      r.baseline_effect = params.mu(EventCatalog::conversion()) / ctx.conversion_intensity();
      if (granularity == Granularity::Touchpoint) {
        for (std::size_t i : touchpoints_before(path, target))
          r.touchpoints.push_back(touchpoint(path, catalog, i, score(RemovalSet({i}, target))));
      }
      for (ChannelIndex z = 0; z < catalog.num_channels(); ++z)
        r.channels[catalog.channel_name(z)] = score(channel_removal_set(path, catalog, target, z));
    } catch (const Error& e) {
      r.touchpoints.clear();
      r.channels.clear();
      r.baseline_effect.reset();
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

template <class PerPath>
std::vector<ConversionReport> gather(std::span<const Path> paths, unsigned threads, PerPath&& per_path) {
  std::vector<std::vector<ConversionReport>> parts(paths.size());
  parallel_for(paths.size(), threads, [&](std::size_t i) { parts[i] = per_path(paths[i]); });
  std::vector<ConversionReport> out;
  for (auto& part : parts)
    for (auto& r : part) out.push_back(std::move(r));
  return out;
}

}  // namespace

std::vector<ConversionReport> score_paths(std::span<const Path> paths, const ModelParams& params,
                                          const EventCatalog& catalog, ScoreMethod method, Granularity granularity,
                                          unsigned threads) {
  if (method == ScoreMethod::TreThinning)
    throw InvalidArgument("batch scoring supports dre and tre (backprop); use tre_thinning directly");
  params.validate();
  if (params.num_types() != catalog.num_types() || params.num_customer() != catalog.num_customer())
    throw InvalidArgument("model dimensions do not match the catalog");
  return gather(paths, threads,
                [&](const Path& p) { return score_path(p, params, catalog, method, granularity); });
}

BaselineRun score_baseline(std::span<const Path> paths, const EventCatalog& catalog, const BaselineSpec& spec,
                           unsigned threads) {
  BaselineRun run;
  const std::string name(to_string(spec.method));

  auto from_touchpoints = [&](const Path& path, std::size_t target, const std::map<std::size_t, double>& scores) {
    ConversionReport r = skeleton(path, target, name);
    for (ChannelIndex z = 0; z < catalog.num_channels(); ++z) r.channels[catalog.channel_name(z)] = 0.0;
    for (const auto& [i, s] : scores) {
      r.touchpoints.push_back(touchpoint(path, catalog, i, s));
      if (const auto z = catalog.channel_of(path.events[i].type)) r.channels[catalog.channel_name(*z)] += s;
    }
    return r;
  };

  switch (spec.method) {
    case BaselineMethod::Logistic: {
      const LogisticAttribution model(paths, catalog);
      run.warnings = model.warnings();
      run.reports = gather(paths, threads, [&](const Path& p) {
        std::vector<ConversionReport> out;
        for (std::size_t target : p.conversion_positions()) out.push_back(from_touchpoints(p, target, model.score(p, target)));
        return out;
      });
      break;
    }
    case BaselineMethod::Markov: {
      const MarkovResult markov = markov_removal(paths, catalog);
      run.warnings = markov.warnings;
      double total = 0.0;
      for (double v : markov.removal_effect) total += v;
      run.reports = gather(paths, threads, [&](const Path& p) {
        std::vector<ConversionReport> out;
        for (std::size_t target : p.conversion_positions()) {
          ConversionReport r = skeleton(p, target, name);
          for (ChannelIndex z = 0; z < catalog.num_channels(); ++z) {
            const double v = markov.removal_effect[static_cast<std::size_t>(z)];
            r.channels[catalog.channel_name(z)] = total > 0.0 ? v / total : 0.0;
          }
          out.push_back(std::move(r));
        }
        return out;
      });
      break;
    }
    default:
      run.reports = gather(paths, threads, [&](const Path& p) {
        std::vector<ConversionReport> out;
        for (std::size_t target : p.conversion_positions())
          out.push_back(from_touchpoints(p, target, rule_score(p, target, spec)));
        return out;
      });
  }
  return run;
}

}  // namespace gpattr
