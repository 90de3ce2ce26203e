#include "chaosmab/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaosmab/config.hpp"
#include "chaosmab/csv.hpp"
#include "chaosmab/errors.hpp"
#include "chaosmab/harness.hpp"
#include "chaosmab/signal.hpp"
#include "chaosmab/version.hpp"

namespace chaosmab {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool full_scale = false;
  unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool with_full_scale = true) {
  cmd->add_option("-c,--config", opts.config_path, "experiment config file (JSON)")->required();
  cmd->add_option("-o,--out-dir", opts.out_dir, "output directory (created if missing)");
  cmd->add_option("--set", opts.overrides, "override a config key, e.g. --set bandit.p0=0.5");
  cmd->add_option("--seed", opts.seed, "override master_seed")->each([&](const std::string&) {
    opts.seed_given = true;
  });
  cmd->add_option("--threads", opts.threads, "worker threads (0 = hardware)");
  if (with_full_scale)
    cmd->add_flag("--full-scale", opts.full_scale, "use the full 12,000 repetitions");
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  return doc;
}

ExperimentConfig resolve_config(const CommonOptions& opts) {
  std::vector<std::string> overrides = opts.overrides;
  if (opts.seed_given) overrides.push_back("master_seed=" + std::to_string(opts.seed));
  if (opts.full_scale) overrides.push_back("repetitions=12000");
  const json merged = normalized_config_doc(load_json_file(opts.config_path), overrides);
  return config_from_json(merged);
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

void write_summary(const std::string& path, const RunResult& result) {
  json summary;
  summary["experiment"] =
      result.config.experiment == ExperimentKind::bandit ? "bandit" : "channel";
  summary["average_csr"] = result.average_csr;
  summary["repetitions"] = result.config.repetitions;
  summary["cycles"] = result.config.cycles;
  summary["master_seed"] = result.config.master_seed;
  summary["build"] = result.build;
  summary["config"] = config_to_json(result.config);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write summary: " + path);
  out << summary.dump(2) << '\n';
}

int cmd_simulate_bandit(const CommonOptions& opts) {
  const ExperimentConfig config = resolve_config(opts);
  const RunResult result = run_bandit_experiment(config, opts.threads);
  ensure_out_dir(opts.out_dir);

  CsvWriter csv((fs::path(opts.out_dir) / "csr_curve.csv").string());
  csv.row({"cycle", "mean_csr"});
  for (std::size_t t = 0; t < result.per_cycle_csr.size(); ++t)
    csv.row({std::to_string(t), format_double(result.per_cycle_csr[t])});

  write_summary((fs::path(opts.out_dir) / "summary.json").string(), result);
  std::cout << "average_csr=" << format_double(result.average_csr) << " repetitions="
            << config.repetitions << " -> " << opts.out_dir << "\n";
  return kExitOk;
}

int cmd_simulate_channel(const CommonOptions& opts) {
  const ExperimentConfig config = resolve_config(opts);
  const RunResult result = run_channel_experiment(config, opts.threads);
  ensure_out_dir(opts.out_dir);

  CsvWriter csv((fs::path(opts.out_dir) / "selection_log.csv").string());
  csv.row({"cycle", "channel", "throughput_mbps", "reward"});
  for (const auto& log : result.selection_logs)
    for (const auto& rec : log)
      csv.row({std::to_string(rec.cycle), std::to_string(rec.channel),
               format_double(rec.throughput_mbps), rec.rewarded ? "1" : "0"});

  write_summary((fs::path(opts.out_dir) / "summary.json").string(), result);
  std::cout << "best_channel_rate=" << format_double(result.average_csr) << " -> "
            << opts.out_dir << "\n";
  return kExitOk;
}

int cmd_analyze_signal(const CommonOptions& opts, std::uint64_t samples, std::uint32_t max_lag) {
  const ExperimentConfig config = resolve_config(opts);
  SignalSource source = open_source(config.source, config.master_seed);
  const std::vector<double> acf = source.autocorrelation(samples, max_lag);
  ensure_out_dir(opts.out_dir);

  CsvWriter csv((fs::path(opts.out_dir) / "acf.csv").string());
  csv.row({"lag", "autocorrelation"});
  for (std::size_t k = 0; k < acf.size(); ++k)
    csv.row({std::to_string(k + 1), format_double(acf[k])});

  std::cout << "lags=" << acf.size() << " samples=" << samples << " -> " << opts.out_dir << "\n";
  return kExitOk;
}

int cmd_convert_trace(const std::string& input, const std::string& output,
                      std::uint64_t sample_interval_ps, std::int64_t declared_length) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw DataError("cannot open input: " + input);
  std::vector<std::uint8_t> payload((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
  if (payload.empty()) throw DataError("input is empty: " + input);
  if (declared_length >= 0 &&
      static_cast<std::uint64_t>(declared_length) != payload.size())
    throw DataError("declared length " + std::to_string(declared_length) + " does not match payload of " +
                    std::to_string(payload.size()) + " bytes");
  write_trace(output, payload, sample_interval_ps);
  std::cout << "wrote " << payload.size() << " samples to " << output << " (+ .meta)\n";
  return kExitOk;
}

int cmd_validate_config(const CommonOptions& opts) {
  std::vector<std::string> overrides = opts.overrides;
  if (opts.seed_given) overrides.push_back("master_seed=" + std::to_string(opts.seed));
  if (opts.full_scale) overrides.push_back("repetitions=12000");
  const json merged = normalized_config_doc(load_json_file(opts.config_path), overrides);
  const ExperimentConfig config = config_from_json(merged);
  std::cout << config_to_json(config).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"chaos-signal-driven multi-armed bandit simulator"};
  app.set_version_flag("--version", std::string(kBuildId));
  app.require_subcommand(1);

  CommonOptions bandit_opts;
  auto* sim_bandit = app.add_subcommand(
      "simulate-bandit", "run the switching two-armed bandit study, write csr_curve.csv");
  add_common(sim_bandit, bandit_opts);

  CommonOptions channel_opts;
  auto* sim_channel = app.add_subcommand(
      "simulate-channel", "run the four-channel selection simulation, write selection_log.csv");
  add_common(sim_channel, channel_opts);

  CommonOptions signal_opts;
  std::uint64_t samples = 1000000;
  std::uint32_t max_lag = 50;
  auto* analyze = app.add_subcommand(
      "analyze-signal", "estimate the source autocorrelation, write acf.csv");
  add_common(analyze, signal_opts, /*with_full_scale=*/false);
  analyze->add_option("-n,--samples", samples, "samples to analyze");
  analyze->add_option("--max-lag", max_lag, "largest lag to report");

  std::string trace_input, trace_output;
  std::uint64_t sample_interval_ps = 10;
  std::int64_t declared_length = -1;
  auto* convert = app.add_subcommand(
      "convert-trace", "package raw 8-bit samples as .chaos + .chaos.meta");
  convert->add_option("-i,--input", trace_input, "raw byte file, one sample per byte")->required();
  convert->add_option("-o,--output", trace_output, "output .chaos path")->required();
  convert->add_option("--sample-interval-ps", sample_interval_ps, "acquisition interval");
  convert->add_option("--length", declared_length, "expected sample count (checked)");

  CommonOptions validate_opts;
  auto* validate = app.add_subcommand(
      "validate-config", "check a config file and print its normalized form");
  add_common(validate, validate_opts);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (sim_bandit->parsed()) return cmd_simulate_bandit(bandit_opts);
    if (sim_channel->parsed()) return cmd_simulate_channel(channel_opts);
    if (analyze->parsed()) return cmd_analyze_signal(signal_opts, samples, max_lag);
    if (convert->parsed())
      return cmd_convert_trace(trace_input, trace_output, sample_interval_ps, declared_length);
    if (validate->parsed()) return cmd_validate_config(validate_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace chaosmab
