#include "chaosmab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "chaosmab/config.hpp"
#include "chaosmab/errors.hpp"
#include "chaosmab/version.hpp"

namespace chaosmab {

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig config;
  config.experiment = kind;
  if (kind == ExperimentKind::channel) {
    config.depth = 2;
    config.cycles = 200;
    config.repetitions = 1;
  }
  return config;
}

void ExperimentConfig::validate() const {
  source.validate();
  omega.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha: must be in (0, 1]");
  if (depth < 1 || depth > 20) throw ConfigError("depth: must be in [1, 20]");
  if (cycles < 1) throw ConfigError("cycles: must be >= 1");
  if (repetitions < 1) throw ConfigError("repetitions: must be >= 1");
  if (calibration_samples < 1000) throw ConfigError("calibration_samples: must be >= 1000");
  if (!(estimator.beta > 0.0 && estimator.beta <= 1.0))
    throw ConfigError("estimator.beta: must be in (0, 1]");
  if (!(estimator.initial_p_hat >= 0.0 && estimator.initial_p_hat <= 1.0))
    throw ConfigError("estimator.initial_p_hat: must be in [0, 1]");
  if (experiment == ExperimentKind::bandit) {
    if (depth != 1) throw ConfigError("depth: bandit experiment is two-armed, depth must be 1");
    if (!(bandit.p0 >= 0.0 && bandit.p0 <= 1.0)) throw ConfigError("bandit.p0: must be in [0, 1]");
    if (!(bandit.p1 >= 0.0 && bandit.p1 <= 1.0)) throw ConfigError("bandit.p1: must be in [0, 1]");
    if (bandit.swap_period < 1) throw ConfigError("bandit.swap_period: must be >= 1");
  } else {
    channel.model.validate();
    const std::size_t arms = std::size_t{1} << depth;
    if (channel.model.channels.size() != arms)
      throw ConfigError("channel.channels: need exactly " + std::to_string(arms) +
                        " channels for depth " + std::to_string(depth));
    if (arm_to_channel.size() != arms)
      throw ConfigError("arm_to_channel: need exactly " + std::to_string(arms) + " entries");
    for (int ch : arm_to_channel) {
      if (std::find(channel.model.channels.begin(), channel.model.channels.end(), ch) ==
          channel.model.channels.end())
        throw ConfigError("arm_to_channel: channel " + std::to_string(ch) +
                          " is not in channel.channels");
    }
    if (channel.reward_mode == RewardRule::Mode::windowed && channel.reward_window < 1)
      throw ConfigError("channel.reward_window: must be >= 1");
  }
}

namespace {

unsigned resolve_threads(unsigned threads, std::uint32_t repetitions) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  return std::max(1u, std::min<unsigned>(threads, repetitions));
}

// Runs body(worker, rep) for every repetition. Workers own disjoint
// contiguous repetition ranges and write only to per-repetition slots and
// their own accumulators, so results cannot depend on scheduling. The first
// worker exception is rethrown on the caller's thread.
template <typename Body>
void for_each_repetition(std::uint32_t repetitions, unsigned workers, const Body& body) {
  if (workers <= 1) {
    for (std::uint32_t rep = 0; rep < repetitions; ++rep) body(0u, rep);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mutex;
  for (unsigned worker = 0; worker < workers; ++worker) {
    const auto begin = static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(repetitions) * worker / workers);
    const auto end = static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(repetitions) * (worker + 1) / workers);
    pool.emplace_back([&, worker, begin, end] {
      try {
        for (std::uint32_t rep = begin; rep < end; ++rep) body(worker, rep);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

void finalize_csr(const std::vector<std::vector<std::uint32_t>>& worker_counts,
                  std::uint32_t repetitions, RunResult& result) {
  const std::size_t cycles = worker_counts.front().size();
  std::vector<std::uint32_t> counts(cycles, 0);
  for (const auto& local : worker_counts)
    for (std::size_t t = 0; t < cycles; ++t) counts[t] += local[t];
  result.per_cycle_csr.resize(cycles);
  for (std::size_t t = 0; t < cycles; ++t)
    result.per_cycle_csr[t] = static_cast<double>(counts[t]) / static_cast<double>(repetitions);
  double sum = 0.0;
  for (double v : result.per_cycle_csr) sum += v;
  result.average_csr = sum / static_cast<double>(cycles);
}

struct RepetitionSetup {
  SignalSource source;
  Rng env_rng;
  ThresholdTree tree;
  RewardEstimates estimates;
};

// Trace payloads are loaded once per experiment and shared into every
// repetition (replay ignores the seed); synthetic sources open per
// repetition from their derived seed.
class SourceFactory {
 public:
  explicit SourceFactory(const SourceSpec& spec) : spec_(spec) {
    if (spec_.kind == SourceKind::trace)
      prototype_.emplace(open_source(spec_, 0));
  }

  SignalSource open(std::uint64_t seed) const {
    return prototype_ ? prototype_->restarted() : open_source(spec_, seed);
  }

 private:
  SourceSpec spec_;
  std::optional<SignalSource> prototype_;
};

RepetitionSetup make_repetition(const ExperimentConfig& config, const SourceFactory& sources,
                                std::uint32_t rep) {
  const std::uint64_t rep_seed = derive_seed(config.master_seed, rep);
  SignalSource source = sources.open(derive_seed(rep_seed, 0));
  Rng env_rng(derive_seed(rep_seed, 1));
  ThresholdTree tree(config.depth, config.alpha, source.calibrate(config.calibration_samples));
  RewardEstimates estimates(tree.arm_count(), config.estimator.beta,
                            config.estimator.initial_p_hat);
  return RepetitionSetup{std::move(source), env_rng, std::move(tree), std::move(estimates)};
}

}  // namespace

RunResult run_bandit_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  if (config.experiment != ExperimentKind::bandit)
    throw ConfigError("experiment: expected 'bandit'");

  const std::uint32_t reps = config.repetitions;
  const std::uint64_t cycles = config.cycles;
  const bool flexible = config.omega.mode == OmegaStrategy::Mode::flexible;

  RunResult result;
  result.per_rep_csr.resize(reps);

  const SourceFactory sources(config.source);
  const unsigned workers = resolve_threads(threads, reps);
  std::vector<std::vector<std::uint32_t>> worker_counts(
      workers, std::vector<std::uint32_t>(cycles, 0));

  for_each_repetition(reps, workers, [&](unsigned worker, std::uint32_t rep) {
    RepetitionSetup setup = make_repetition(config, sources, rep);
    SwitchingBernoulliEnv env(config.bandit.p0, config.bandit.p1, config.bandit.swap_period);
    auto& local_counts = worker_counts[worker];

    std::uint64_t correct_total = 0;
    for (std::uint64_t t = 0; t < cycles; ++t) {
      const Decision decision = setup.tree.decide(setup.source);
      const auto [e0, e1] = env.effective_probs(t);
      const bool correct = e0 == e1 || decision.arm == (e1 > e0 ? 1u : 0u);
      local_counts[t] += correct ? 1 : 0;
      correct_total += correct ? 1 : 0;
      const bool rewarded = env.pull(static_cast<int>(decision.arm), setup.env_rng);
      if (!config.freeze_thresholds)
        setup.tree.update(decision, rewarded, config.omega, setup.estimates);
      if (flexible) setup.estimates.update(decision.arm, rewarded);
    }
    result.per_rep_csr[rep] = static_cast<double>(correct_total) / static_cast<double>(cycles);
  });

  finalize_csr(worker_counts, reps, result);
  result.config = config;
  result.build = std::string(kBuildId);
  return result;
}

RunResult run_channel_experiment(const ExperimentConfig& config, unsigned threads) {
  config.validate();
  if (config.experiment != ExperimentKind::channel)
    throw ConfigError("experiment: expected 'channel'");

  const std::uint32_t reps = config.repetitions;
  const std::uint64_t cycles = config.cycles;
  const bool flexible = config.omega.mode == OmegaStrategy::Mode::flexible;

  RunResult result;
  result.per_rep_csr.resize(reps);
  result.selection_logs.resize(reps);

  const SourceFactory sources(config.source);
  const unsigned workers = resolve_threads(threads, reps);
  std::vector<std::vector<std::uint32_t>> worker_counts(
      workers, std::vector<std::uint32_t>(cycles, 0));

  for_each_repetition(reps, workers, [&](unsigned worker, std::uint32_t rep) {
    RepetitionSetup setup = make_repetition(config, sources, rep);
    ChannelEnv env(config.channel.model);
    RewardRule rule = config.channel.reward_mode == RewardRule::Mode::windowed
                          ? RewardRule::windowed(config.channel.reward_window)
                          : RewardRule{};
    auto& local_counts = worker_counts[worker];
    auto& log = result.selection_logs[rep];
    log.reserve(cycles);

    std::uint64_t correct_total = 0;
    for (std::uint64_t t = 0; t < cycles; ++t) {
      const Decision decision = setup.tree.decide(setup.source);
      const int channel = config.arm_to_channel[decision.arm];
      const bool correct = channel == env.best_channel(t);
      local_counts[t] += correct ? 1 : 0;
      correct_total += correct ? 1 : 0;
      const ThroughputSample obs = env.step(channel, setup.env_rng);
      const bool rewarded = rule.reward(obs);
      if (!config.freeze_thresholds)
        setup.tree.update(decision, rewarded, config.omega, setup.estimates);
      if (flexible) setup.estimates.update(decision.arm, rewarded);
      log.push_back(SelectionRecord{t, channel, obs.mbps, rewarded});
    }
    result.per_rep_csr[rep] = static_cast<double>(correct_total) / static_cast<double>(cycles);
  });

  finalize_csr(worker_counts, reps, result);
  result.config = config;
  result.build = std::string(kBuildId);
  return result;
}

namespace {

double sample_standard_error(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

}  // namespace

StrategyComparison compare_strategies(const ExperimentConfig& a, const ExperimentConfig& b,
                                      unsigned threads) {
  a.validate();
  b.validate();
  if (a.omega.mode == b.omega.mode)
    throw ConfigError("compare_strategies: configs must differ in omega.mode");
  nlohmann::ordered_json ja = config_to_json(a);
  nlohmann::ordered_json jb = config_to_json(b);
  ja["omega"].erase("mode");
  jb["omega"].erase("mode");
  if (ja != jb)
    throw ConfigError("compare_strategies: configs must be identical except omega.mode");

  RunResult (*const run)(const ExperimentConfig&, unsigned) =
      a.experiment == ExperimentKind::bandit ? &run_bandit_experiment : &run_channel_experiment;
  const RunResult ra = run(a, threads);
  const RunResult rb = run(b, threads);

  StrategyComparison cmp;
  cmp.average_csr_a = ra.average_csr;
  cmp.average_csr_b = rb.average_csr;
  cmp.difference = ra.average_csr - rb.average_csr;
  cmp.se_a = sample_standard_error(ra.per_rep_csr);
  cmp.se_b = sample_standard_error(rb.per_rep_csr);
  std::vector<double> paired(ra.per_rep_csr.size());
  for (std::size_t r = 0; r < paired.size(); ++r)
    paired[r] = ra.per_rep_csr[r] - rb.per_rep_csr[r];
  cmp.se_difference = sample_standard_error(paired);
  return cmp;
}

}  // namespace chaosmab
