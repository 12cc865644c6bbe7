#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json_io.hpp"

namespace entrybar::cli {

inline constexpr int kSchemaVersion = 1;

/// Result of one operation: the JSON document and zero or more CSV tables
/// keyed by a file-name suffix ("" is the main table).
struct Artifacts {
  nlohmann::ordered_json document;
  std::vector<std::pair<std::string, std::string>> tables;
};

json load_config(const std::string& path);

/// Canonical operation name for "solve"/"ro-solve" style spellings.
std::string canonical_operation(const std::string& name);

/// FNV-1a over the canonical dump of the result-relevant config keys.
std::string config_hash(const json& config);

/// Validates the config, runs the operation and renders its outputs with the
/// reproducibility header. Throws ConfigError for schema problems; solver
/// errors propagate.
Artifacts run_config(const json& config);

/// Writes the artifacts to the config's output paths (JSON to stdout when no
/// path is given).
void write_artifacts(const json& config, const Artifacts& artifacts);

/// 1 config error, 2 precondition failure, 3 numerical failure.
int exit_code_for(const std::exception& e);

}  // namespace entrybar::cli
