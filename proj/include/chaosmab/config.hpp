#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "chaosmab/harness.hpp"

namespace chaosmab {

// Canonical JSON form of a config; doubles as the schema for key validation.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

// Parses a config document. Unknown or ill-typed keys raise ConfigError
// naming the offending key. Missing keys keep the per-experiment defaults.
ExperimentConfig config_from_json(const nlohmann::ordered_json& doc);

ExperimentConfig load_config_file(const std::string& path);

// Normalized document: per-experiment defaults, overlaid with the config
// file, then `--set dotted.key=value` overrides applied in order. Unknown
// keys anywhere raise ConfigError naming the key.
nlohmann::ordered_json normalized_config_doc(const nlohmann::ordered_json& file_doc,
                                             const std::vector<std::string>& overrides);

// Applies one `--set dotted.key=value` override in place; the key must exist.
void apply_override(nlohmann::ordered_json& doc, const std::string& assignment);

// Source specs reuse the same machinery for analyze-signal configs.
nlohmann::ordered_json source_to_json(const SourceSpec& spec);
SourceSpec source_from_json(const nlohmann::ordered_json& doc);

}  // namespace chaosmab
