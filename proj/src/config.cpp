#include "chaosmab/config.hpp"

#include <fstream>

#include "chaosmab/errors.hpp"

namespace chaosmab {

namespace {

using json = nlohmann::ordered_json;

std::string kind_name(SourceKind kind) {
  switch (kind) {
    case SourceKind::trace: return "trace";
    case SourceKind::logistic: return "logistic";
    case SourceKind::tent: return "tent";
    case SourceKind::ar1: return "ar1";
    case SourceKind::uniform: return "uniform";
  }
  return "logistic";
}

SourceKind kind_from_name(const std::string& name) {
  if (name == "trace") return SourceKind::trace;
  if (name == "logistic") return SourceKind::logistic;
  if (name == "tent") return SourceKind::tent;
  if (name == "ar1") return SourceKind::ar1;
  if (name == "uniform") return SourceKind::uniform;
  throw ConfigError("source.kind: unknown value '" + name + "'");
}

template <typename T>
T read_as(const json& node, const std::string& key_path) {
  try {
    return node.get<T>();
  } catch (const std::exception&) {
    throw ConfigError(key_path + ": invalid value " + node.dump());
  }
}

template <typename T>
void read_if_present(const json& doc, const std::string& key, const std::string& path, T& out) {
  if (doc.contains(key)) out = read_as<T>(doc.at(key), path);
}

// Every key of `doc` must exist in `schema`, recursively for objects.
void reject_unknown_keys(const json& doc, const json& schema, const std::string& prefix) {
  if (!doc.is_object()) return;
  for (const auto& [key, value] : doc.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!schema.is_object() || !schema.contains(key))
      throw ConfigError("unknown config key: " + path);
    if (value.is_object()) reject_unknown_keys(value, schema.at(key), path);
  }
}

}  // namespace

json source_to_json(const SourceSpec& spec) {
  json doc;
  doc["kind"] = kind_name(spec.kind);
  doc["path"] = spec.trace_path;
  doc["r"] = spec.logistic_r;
  doc["slope"] = spec.tent_slope;
  doc["phi"] = spec.ar1_phi;
  doc["noise_std"] = spec.ar1_noise_std;
  doc["stride"] = spec.stride;
  doc["wrap_policy"] = spec.wrap_policy == WrapPolicy::wrap ? "wrap" : "error";
  return doc;
}

SourceSpec source_from_json(const json& doc) {
  SourceSpec spec;
  if (doc.contains("kind")) spec.kind = kind_from_name(read_as<std::string>(doc.at("kind"), "source.kind"));
  read_if_present(doc, "path", "source.path", spec.trace_path);
  read_if_present(doc, "r", "source.r", spec.logistic_r);
  read_if_present(doc, "slope", "source.slope", spec.tent_slope);
  read_if_present(doc, "phi", "source.phi", spec.ar1_phi);
  read_if_present(doc, "noise_std", "source.noise_std", spec.ar1_noise_std);
  read_if_present(doc, "stride", "source.stride", spec.stride);
  if (doc.contains("wrap_policy")) {
    const auto policy = read_as<std::string>(doc.at("wrap_policy"), "source.wrap_policy");
    if (policy == "wrap")
      spec.wrap_policy = WrapPolicy::wrap;
    else if (policy == "error")
      spec.wrap_policy = WrapPolicy::error;
    else
      throw ConfigError("source.wrap_policy: unknown value '" + policy + "'");
  }
  return spec;
}

json config_to_json(const ExperimentConfig& config) {
  json doc;
  doc["experiment"] = config.experiment == ExperimentKind::bandit ? "bandit" : "channel";
  doc["source"] = source_to_json(config.source);
  doc["depth"] = config.depth;
  doc["alpha"] = config.alpha;
  doc["omega"] = {
      {"mode", config.omega.mode == OmegaStrategy::Mode::fixed ? "fixed" : "flexible"},
      {"fixed_value", config.omega.fixed_value},
      {"omega_max", config.omega.omega_max},
  };
  doc["estimator"] = {
      {"beta", config.estimator.beta},
      {"initial_p_hat", config.estimator.initial_p_hat},
  };
  doc["bandit"] = {
      {"p0", config.bandit.p0},
      {"p1", config.bandit.p1},
      {"swap_period", config.bandit.swap_period},
  };
  doc["channel"] = {
      {"channels", config.channel.model.channels},
      {"best_sequence", config.channel.model.best_sequence},
      {"block_length", config.channel.model.block_length},
      {"vacant_mbps", config.channel.model.vacant_mbps},
      {"congested_mbps", config.channel.model.congested_mbps},
      {"noise_std_mbps", config.channel.model.noise_std_mbps},
      {"reward_mode",
       config.channel.reward_mode == RewardRule::Mode::cumulative ? "cumulative" : "windowed"},
      {"reward_window", config.channel.reward_window},
  };
  doc["cycles"] = config.cycles;
  doc["repetitions"] = config.repetitions;
  doc["master_seed"] = config.master_seed;
  doc["arm_to_channel"] = config.arm_to_channel;
  doc["calibration_samples"] = config.calibration_samples;
  doc["freeze_thresholds"] = config.freeze_thresholds;
  return doc;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");

  ExperimentKind kind = ExperimentKind::bandit;
  if (doc.contains("experiment")) {
    const auto name = read_as<std::string>(doc.at("experiment"), "experiment");
    if (name == "bandit")
      kind = ExperimentKind::bandit;
    else if (name == "channel")
      kind = ExperimentKind::channel;
    else
      throw ConfigError("experiment: unknown value '" + name + "'");
  }

  ExperimentConfig config = ExperimentConfig::defaults(kind);
  reject_unknown_keys(doc, config_to_json(config), "");

  if (doc.contains("source")) config.source = source_from_json(doc.at("source"));
  read_if_present(doc, "depth", "depth", config.depth);
  read_if_present(doc, "alpha", "alpha", config.alpha);
  if (doc.contains("omega")) {
    const json& node = doc.at("omega");
    if (node.contains("mode")) {
      const auto mode = read_as<std::string>(node.at("mode"), "omega.mode");
      if (mode == "fixed")
        config.omega.mode = OmegaStrategy::Mode::fixed;
      else if (mode == "flexible")
        config.omega.mode = OmegaStrategy::Mode::flexible;
      else
        throw ConfigError("omega.mode: unknown value '" + mode + "'");
    }
    read_if_present(node, "fixed_value", "omega.fixed_value", config.omega.fixed_value);
    read_if_present(node, "omega_max", "omega.omega_max", config.omega.omega_max);
  }
  if (doc.contains("estimator")) {
    const json& node = doc.at("estimator");
    read_if_present(node, "beta", "estimator.beta", config.estimator.beta);
    read_if_present(node, "initial_p_hat", "estimator.initial_p_hat",
                    config.estimator.initial_p_hat);
  }
  if (doc.contains("bandit")) {
    const json& node = doc.at("bandit");
    read_if_present(node, "p0", "bandit.p0", config.bandit.p0);
    read_if_present(node, "p1", "bandit.p1", config.bandit.p1);
    read_if_present(node, "swap_period", "bandit.swap_period", config.bandit.swap_period);
  }
  if (doc.contains("channel")) {
    const json& node = doc.at("channel");
    read_if_present(node, "channels", "channel.channels", config.channel.model.channels);
    read_if_present(node, "best_sequence", "channel.best_sequence",
                    config.channel.model.best_sequence);
    read_if_present(node, "block_length", "channel.block_length",
                    config.channel.model.block_length);
    read_if_present(node, "vacant_mbps", "channel.vacant_mbps", config.channel.model.vacant_mbps);
    read_if_present(node, "congested_mbps", "channel.congested_mbps",
                    config.channel.model.congested_mbps);
    read_if_present(node, "noise_std_mbps", "channel.noise_std_mbps",
                    config.channel.model.noise_std_mbps);
    if (node.contains("reward_mode")) {
      const auto mode = read_as<std::string>(node.at("reward_mode"), "channel.reward_mode");
      if (mode == "cumulative")
        config.channel.reward_mode = RewardRule::Mode::cumulative;
      else if (mode == "windowed")
        config.channel.reward_mode = RewardRule::Mode::windowed;
      else
        throw ConfigError("channel.reward_mode: unknown value '" + mode + "'");
    }
    read_if_present(node, "reward_window", "channel.reward_window", config.channel.reward_window);
  }
  read_if_present(doc, "cycles", "cycles", config.cycles);
  read_if_present(doc, "repetitions", "repetitions", config.repetitions);
  read_if_present(doc, "master_seed", "master_seed", config.master_seed);
  read_if_present(doc, "arm_to_channel", "arm_to_channel", config.arm_to_channel);
  read_if_present(doc, "calibration_samples", "calibration_samples", config.calibration_samples);
  read_if_present(doc, "freeze_thresholds", "freeze_thresholds", config.freeze_thresholds);

  config.validate();
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(normalized_config_doc(doc, {}));
}

namespace {

json parse_override_value(const std::string& raw) {
  json parsed = json::parse(raw, nullptr, false);
  return parsed.is_discarded() ? json(raw) : parsed;
}

void deep_merge(json& base, const json& overlay) {
  for (const auto& [key, value] : overlay.items()) {
    if (value.is_object() && base.contains(key) && base[key].is_object())
      deep_merge(base[key], value);
    else
      base[key] = value;
  }
}

}  // namespace

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key.path=value: '" + assignment + "'");
  const std::string key_path = assignment.substr(0, eq);
  const std::string raw_value = assignment.substr(eq + 1);

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key_path.find('.', start);
    const std::string segment = key_path.substr(start, dot - start);
    if (segment.empty() || !node->is_object() || !node->contains(segment))
      throw ConfigError("unknown config key: " + key_path);
    if (dot == std::string::npos) {
      (*node)[segment] = parse_override_value(raw_value);
      return;
    }
    node = &(*node)[segment];
    start = dot + 1;
  }
}

json normalized_config_doc(const json& file_doc, const std::vector<std::string>& overrides) {
  if (!file_doc.is_object()) throw ConfigError("config document must be a JSON object");

  // The experiment kind picks the defaults, so resolve it first; a --set
  // override of `experiment` wins over the file.
  json kind_node = file_doc.contains("experiment") ? file_doc.at("experiment") : json("bandit");
  for (const auto& assignment : overrides) {
    if (assignment.rfind("experiment=", 0) == 0)
      kind_node = parse_override_value(assignment.substr(std::string("experiment=").size()));
  }
  const std::string kind_name = kind_node.is_string() ? kind_node.get<std::string>() : kind_node.dump();
  ExperimentKind kind;
  if (kind_name == "bandit")
    kind = ExperimentKind::bandit;
  else if (kind_name == "channel")
    kind = ExperimentKind::channel;
  else
    throw ConfigError("experiment: unknown value '" + kind_name + "'");

  json merged = config_to_json(ExperimentConfig::defaults(kind));
  reject_unknown_keys(file_doc, merged, "");
  deep_merge(merged, file_doc);
  merged["experiment"] = kind_name;
  for (const auto& assignment : overrides) apply_override(merged, assignment);
  return merged;
}

}  // namespace chaosmab
