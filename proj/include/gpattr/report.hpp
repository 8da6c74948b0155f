#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpattr/attribution.hpp"
#include "gpattr/baselines.hpp"
#include "gpattr/io.hpp"

namespace gpattr {

enum class Granularity { Touchpoint, Channel };

Granularity parse_granularity(std::string_view name);

struct TouchpointScore {
  std::size_t index = 0;
  double t = 0.0;
  std::string type;
  std::optional<std::string> channel;
  double score = 0.0;
};

/// Scores for one conversion event. One report is one JSONL line.
struct ConversionReport {
  std::string path_id;
  std::size_t conversion_index = 0;
  double conversion_time = 0.0;
  std::string method;
  std::optional<double> baseline_effect;
  std::vector<TouchpointScore> touchpoints;
  std::map<std::string, double> channels;  // score of the whole-channel removal set
  std::optional<std::string> error;
};

Json report_to_json(const ConversionReport& report);
ConversionReport report_from_json(const Json& j);
void write_reports(std::ostream& out, const std::vector<ConversionReport>& reports);
std::vector<ConversionReport> load_reports(std::istream& in);
std::vector<ConversionReport> read_reports_file(const std::string& filename);

/// Model-based scoring of every conversion of every path. `method` is Dre or
/// TreBackprop. Channel scores are always filled; touchpoint (singleton)
/// scores only for Granularity::Touchpoint. A failing conversion yields a
/// report with `error` set instead of aborting the batch.
std::vector<ConversionReport> score_paths(std::span<const Path> paths, const ModelParams& params,
                                          const EventCatalog& catalog, ScoreMethod method, Granularity granularity,
                                          unsigned threads = 1);

struct BaselineRun {
  std::vector<ConversionReport> reports;
  std::vector<std::string> warnings;
};

/// Baseline scoring in the same report schema. Channel scores of touchpoint
/// methods are sums of their touchpoint scores.
BaselineRun score_baseline(std::span<const Path> paths, const EventCatalog& catalog, const BaselineSpec& spec,
                           unsigned threads = 1);

}  // namespace gpattr
