#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chaosmab/decision.hpp"
#include "chaosmab/environment.hpp"
#include "chaosmab/signal.hpp"

namespace chaosmab {

enum class ExperimentKind { bandit, channel };

struct EstimatorConfig {
  double beta = 0.02;
  double initial_p_hat = 0.5;
};

struct BanditParams {
  double p0 = 0.1;
  double p1 = 0.9;
  std::uint32_t swap_period = 2500;
};

struct ChannelParams {
  ChannelEnv::Params model{};
  RewardRule::Mode reward_mode = RewardRule::Mode::cumulative;
  std::uint32_t reward_window = 50;  // windowed mode only
};

// Full description of one experiment. Everything that affects the output is
// in here; worker thread count is deliberately not (results are identical for
// any scheduling).
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::bandit;
  SourceSpec source{};
  std::uint32_t depth = 1;
  double alpha = 0.9;
  OmegaStrategy omega{};
  EstimatorConfig estimator{};
  BanditParams bandit{};
  ChannelParams channel{};
  std::uint64_t cycles = 10000;
  std::uint32_t repetitions = 1000;
  std::uint64_t master_seed = 1;
  std::vector<int> arm_to_channel = {36, 40, 44, 48};
  std::uint64_t calibration_samples = 10000;
  bool freeze_thresholds = false;  // diagnostic baseline: skip all updates

  static ExperimentConfig defaults(ExperimentKind kind);
  void validate() const;  // throws ConfigError
};

struct SelectionRecord {
  std::uint64_t cycle = 0;
  int channel = 0;
  double throughput_mbps = 0.0;
  bool rewarded = false;
};

struct RunResult {
  // Fraction of repetitions making the correct choice at each cycle (bandit:
  // higher effective probability, tie counts correct; channel: best channel).
  std::vector<double> per_cycle_csr;
  double average_csr = 0.0;
  // Mean correctness of each repetition across its cycles.
  std::vector<double> per_rep_csr;
  // Channel experiment only: one log per repetition.
  std::vector<std::vector<SelectionRecord>> selection_logs;

  ExperimentConfig config{};
  std::string build;
};

// Runs the switching-bandit study: per repetition r, derives an independent
// seed from (master_seed, r) and plays `cycles` rounds of
// decide -> pull -> update (estimates update too in flexible mode).
// threads = 0 picks the hardware count; the result is identical either way.
RunResult run_bandit_experiment(const ExperimentConfig& config, unsigned threads = 0);

// Runs the rotating-congestion channel selection: decide (depth samples) ->
// map arm to channel -> observe throughput -> reward vs running mean ->
// update, logging every cycle.
RunResult run_channel_experiment(const ExperimentConfig& config, unsigned threads = 0);

struct StrategyComparison {
  double average_csr_a = 0.0;
  double average_csr_b = 0.0;
  double difference = 0.0;  // a - b
  double se_a = 0.0;
  double se_b = 0.0;
  // Runs share seeds rep-for-rep, so the difference is paired.
  double se_difference = 0.0;
};

// Requires the configs to be identical except for omega.mode.
StrategyComparison compare_strategies(const ExperimentConfig& a, const ExperimentConfig& b,
                                      unsigned threads = 0);

}  // namespace chaosmab
