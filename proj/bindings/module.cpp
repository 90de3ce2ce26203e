#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chaosmab/cli.hpp"
#include "chaosmab/config.hpp"
#include "chaosmab/decision.hpp"
#include "chaosmab/environment.hpp"
#include "chaosmab/errors.hpp"
#include "chaosmab/harness.hpp"
#include "chaosmab/rng.hpp"
#include "chaosmab/signal.hpp"
#include "chaosmab/version.hpp"

namespace py = pybind11;
using namespace chaosmab;

namespace {

ExperimentConfig config_from_json_str(const std::string& text,
                                      const std::vector<std::string>& overrides) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  return config_from_json(normalized_config_doc(doc, overrides));
}

std::string config_to_json_str(const ExperimentConfig& config) {
  return config_to_json(config).dump(2);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "chaos-signal-driven multi-armed bandit simulator";
  m.attr("__version__") = std::string(kVersion);
  m.attr("BUILD_ID") = std::string(kBuildId);

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  py::enum_<SourceKind>(m, "SourceKind")
      .value("trace", SourceKind::trace)
      .value("logistic", SourceKind::logistic)
      .value("tent", SourceKind::tent)
      .value("ar1", SourceKind::ar1)
      .value("uniform", SourceKind::uniform);

  py::enum_<WrapPolicy>(m, "WrapPolicy")
      .value("wrap", WrapPolicy::wrap)
      .value("error", WrapPolicy::error);

  py::class_<SignalSample>(m, "SignalSample")
      .def_readonly("raw", &SignalSample::raw)
      .def_readonly("value", &SignalSample::value)
      .def("__repr__", [](const SignalSample& s) {
        return "SignalSample(raw=" + std::to_string(s.raw) + ")";
      });

  py::class_<SourceSpec>(m, "SourceSpec")
      .def(py::init<>())
      .def_readwrite("kind", &SourceSpec::kind)
      .def_readwrite("trace_path", &SourceSpec::trace_path)
      .def_readwrite("logistic_r", &SourceSpec::logistic_r)
      .def_readwrite("tent_slope", &SourceSpec::tent_slope)
      .def_readwrite("ar1_phi", &SourceSpec::ar1_phi)
      .def_readwrite("ar1_noise_std", &SourceSpec::ar1_noise_std)
      .def_readwrite("stride", &SourceSpec::stride)
      .def_readwrite("wrap_policy", &SourceSpec::wrap_policy)
      .def("validate", &SourceSpec::validate);

  py::class_<CalibrationStats>(m, "CalibrationStats")
      .def_readonly("quantiles", &CalibrationStats::quantiles)
      .def_readonly("sample_count", &CalibrationStats::sample_count);

  py::class_<SignalSource>(m, "SignalSource")
      .def("next", &SignalSource::next)
      .def("calibrate", &SignalSource::calibrate, py::arg("n"))
      .def("autocorrelation", &SignalSource::autocorrelation, py::arg("n"), py::arg("max_lag"))
      .def("restarted", &SignalSource::restarted)
      .def_property_readonly("seed", &SignalSource::seed);

  m.def("open_source", &open_source, py::arg("spec"), py::arg("seed"));

  py::class_<OmegaStrategy> omega_strategy(m, "OmegaStrategy");
  py::enum_<OmegaStrategy::Mode>(omega_strategy, "Mode")
      .value("fixed", OmegaStrategy::Mode::fixed)
      .value("flexible", OmegaStrategy::Mode::flexible);
  omega_strategy.def(py::init<>())
      .def_readwrite("mode", &OmegaStrategy::mode)
      .def_readwrite("fixed_value", &OmegaStrategy::fixed_value)
      .def_readwrite("omega_max", &OmegaStrategy::omega_max);

  m.def("omega", &omega, py::arg("strategy"), py::arg("p0_hat"), py::arg("p1_hat"));

  py::class_<RewardEstimates>(m, "RewardEstimates")
      .def(py::init<std::size_t, double, double>(), py::arg("arms"), py::arg("beta") = 0.02,
           py::arg("initial") = 0.5)
      .def_readwrite("p_hat", &RewardEstimates::p_hat)
      .def_readwrite("beta", &RewardEstimates::beta)
      .def("update", &RewardEstimates::update, py::arg("arm"), py::arg("rewarded"));

  py::class_<Decision>(m, "Decision")
      .def_readonly("arm", &Decision::arm)
      .def_readonly("bits", &Decision::bits)
      .def_readonly("samples_used", &Decision::samples_used);

  py::class_<ThresholdTree>(m, "ThresholdTree")
      .def(py::init<std::uint32_t, double, CalibrationStats>(), py::arg("depth"),
           py::arg("alpha"), py::arg("level_scale"))
      .def_property_readonly("depth", &ThresholdTree::depth)
      .def_property_readonly("node_count", &ThresholdTree::node_count)
      .def_property_readonly("arm_count", &ThresholdTree::arm_count)
      .def_property_readonly("alpha", &ThresholdTree::alpha)
      .def("node_value", &ThresholdTree::node_value, py::arg("index"))
      .def("set_node_value", &ThresholdTree::set_node_value, py::arg("index"), py::arg("value"))
      .def("node_values", &ThresholdTree::node_values)
      .def_static("quantize_level", &ThresholdTree::quantize_level, py::arg("threshold"))
      .def("effective_threshold", &ThresholdTree::effective_threshold, py::arg("node_index"))
      .def("decide", &ThresholdTree::decide, py::arg("source"))
      .def("update", &ThresholdTree::update, py::arg("decision"), py::arg("rewarded"),
           py::arg("strategy"), py::arg("estimates"));

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &Rng::next_u64)
      .def("next_double", &Rng::next_double)
      .def("next_code", &Rng::next_code)
      .def("next_gaussian", &Rng::next_gaussian)
      .def("bernoulli", &Rng::bernoulli, py::arg("p"));

  m.def("derive_seed", &derive_seed, py::arg("master_seed"), py::arg("index"));

  py::class_<SwitchingBernoulliEnv>(m, "SwitchingBernoulliEnv")
      .def(py::init<double, double, std::uint32_t>(), py::arg("p0"), py::arg("p1"),
           py::arg("swap_period"))
      .def("effective_probs", &SwitchingBernoulliEnv::effective_probs, py::arg("t"))
      .def("pull", &SwitchingBernoulliEnv::pull, py::arg("arm"), py::arg("rng"))
      .def_property_readonly("cycle", &SwitchingBernoulliEnv::cycle);

  py::class_<ThroughputSample>(m, "ThroughputSample")
      .def(py::init<>())
      .def_readwrite("channel", &ThroughputSample::channel)
      .def_readwrite("mbps", &ThroughputSample::mbps)
      .def_readwrite("cycle", &ThroughputSample::cycle);

  py::class_<ChannelEnv> channel_env(m, "ChannelEnv");
  py::class_<ChannelEnv::Params>(channel_env, "Params")
      .def(py::init<>())
      .def_readwrite("channels", &ChannelEnv::Params::channels)
      .def_readwrite("best_sequence", &ChannelEnv::Params::best_sequence)
      .def_readwrite("block_length", &ChannelEnv::Params::block_length)
      .def_readwrite("vacant_mbps", &ChannelEnv::Params::vacant_mbps)
      .def_readwrite("congested_mbps", &ChannelEnv::Params::congested_mbps)
      .def_readwrite("noise_std_mbps", &ChannelEnv::Params::noise_std_mbps);
  channel_env.def(py::init<ChannelEnv::Params>(), py::arg("params"))
      .def("best_channel", &ChannelEnv::best_channel, py::arg("t"))
      .def("step", &ChannelEnv::step, py::arg("channel"), py::arg("rng"))
      .def_property_readonly("cycle", &ChannelEnv::cycle);

  py::class_<RewardRule>(m, "RewardRule")
      .def(py::init<>())
      .def_static("windowed", &RewardRule::windowed, py::arg("window"))
      .def("reward", &RewardRule::reward, py::arg("obs"))
      .def_property_readonly("history_mean", &RewardRule::history_mean)
      .def_property_readonly("count", &RewardRule::count);

  py::enum_<ExperimentKind>(m, "ExperimentKind")
      .value("bandit", ExperimentKind::bandit)
      .value("channel", ExperimentKind::channel);

  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_static("defaults", &ExperimentConfig::defaults, py::arg("kind"))
      .def_readwrite("experiment", &ExperimentConfig::experiment)
      .def_readwrite("source", &ExperimentConfig::source)
      .def_readwrite("depth", &ExperimentConfig::depth)
      .def_readwrite("alpha", &ExperimentConfig::alpha)
      .def_readwrite("omega", &ExperimentConfig::omega)
      .def_readwrite("cycles", &ExperimentConfig::cycles)
      .def_readwrite("repetitions", &ExperimentConfig::repetitions)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("arm_to_channel", &ExperimentConfig::arm_to_channel)
      .def_readwrite("calibration_samples", &ExperimentConfig::calibration_samples)
      .def_readwrite("freeze_thresholds", &ExperimentConfig::freeze_thresholds)
      .def("validate", &ExperimentConfig::validate)
      .def("to_json", &config_to_json_str)
      .def_static("from_json", &config_from_json_str, py::arg("text"),
                  py::arg("overrides") = std::vector<std::string>{});

  py::class_<SelectionRecord>(m, "SelectionRecord")
      .def_readonly("cycle", &SelectionRecord::cycle)
      .def_readonly("channel", &SelectionRecord::channel)
      .def_readonly("throughput_mbps", &SelectionRecord::throughput_mbps)
      .def_readonly("rewarded", &SelectionRecord::rewarded);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("per_cycle_csr", &RunResult::per_cycle_csr)
      .def_readonly("average_csr", &RunResult::average_csr)
      .def_readonly("per_rep_csr", &RunResult::per_rep_csr)
      .def_readonly("selection_logs", &RunResult::selection_logs)
      .def_readonly("build", &RunResult::build)
      .def_property_readonly("config",
                             [](const RunResult& r) { return config_to_json_str(r.config); });

  py::class_<StrategyComparison>(m, "StrategyComparison")
      .def_readonly("average_csr_a", &StrategyComparison::average_csr_a)
      .def_readonly("average_csr_b", &StrategyComparison::average_csr_b)
      .def_readonly("difference", &StrategyComparison::difference)
      .def_readonly("se_a", &StrategyComparison::se_a)
      .def_readonly("se_b", &StrategyComparison::se_b)
      .def_readonly("se_difference", &StrategyComparison::se_difference);

  m.def("run_bandit_experiment", &run_bandit_experiment, py::arg("config"),
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("run_channel_experiment", &run_channel_experiment, py::arg("config"),
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("compare_strategies", &compare_strategies, py::arg("config_a"), py::arg("config_b"),
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("run_cli", &run_cli, py::arg("args"),
        "invoke the command-line interface in-process; returns the exit code");
}
