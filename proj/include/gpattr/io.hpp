#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "gpattr/catalog.hpp"
#include "gpattr/model.hpp"

namespace gpattr {

using Json = nlohmann::json;

/// `{"types": [{"name", "initiator": "customer"|"firm", "channel": str|null}], "conversion": str}`
EventCatalog catalog_from_json(const Json& j);
Json catalog_to_json(const EventCatalog& catalog);
EventCatalog read_catalog_file(const std::string& filename);

/// Parses one JSONL line `{"path_id", "T", "events": [{"t", "e"}]}`. Events are
/// sorted by time; ties, t < 0, t > T, T <= 0 and unknown types are rejected.
Path path_from_json(const Json& j, const EventCatalog& catalog);
Json path_to_json(const Path& path, const EventCatalog& catalog);

/// Reads JSON Lines; blank lines are skipped. Errors carry the 1-based line number.
std::vector<Path> load_paths(std::istream& in, const EventCatalog& catalog);
std::vector<Path> read_paths_file(const std::string& filename, const EventCatalog& catalog);
void write_paths(std::ostream& out, const std::vector<Path>& paths, const EventCatalog& catalog);

/// `{"types": [...], "targets": [...], "mu": [q], "alpha": [[q] x p], "kernel": {"shape", "T0"}}`.
/// Rows follow "types" and columns follow "targets" when present, otherwise
/// the catalog's canonical order. An optional "kernels" p x q grid of
/// {"shape", "T0"} objects overrides the shared kernel per pair.
ModelParams model_from_json(const Json& j, const EventCatalog& catalog);
Json model_to_json(const ModelParams& params, const EventCatalog& catalog);
ModelParams read_model_file(const std::string& filename, const EventCatalog& catalog);

Json read_json_file(const std::string& filename);
void write_json_file(const std::string& filename, const Json& j);

}  // namespace gpattr
