#pragma once

#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include "chaosmab/rng.hpp"

namespace chaosmab {

// Two-armed Bernoulli bandit whose reward probabilities interchange on a
// fixed cycle schedule.
class SwitchingBernoulliEnv {
 public:
  SwitchingBernoulliEnv(double p0, double p1, std::uint32_t swap_period);

  // Schedule at cycle t; pure, does not touch the live counter.
  std::pair<double, double> effective_probs(std::uint64_t t) const;

  // Samples the arm's reward at the current cycle, then advances one cycle.
  bool pull(int arm, Rng& rng);

  std::uint64_t cycle() const { return cycle_; }

 private:
  double p0_;
  double p1_;
  std::uint32_t swap_period_;
  std::uint64_t cycle_ = 0;
};

struct ThroughputSample {
  int channel = 0;
  double mbps = 0.0;
  std::uint64_t cycle = 0;
};

// Four-channel (by default) throughput world with rotating congestion: the
// vacant channel steps through best_sequence, one block at a time, and the
// last block's winner persists afterwards.
class ChannelEnv {
 public:
  struct Params {
    std::vector<int> channels = {36, 40, 44, 48};
    std::vector<int> best_sequence = {48, 44, 40, 36};
    std::uint32_t block_length = 50;
    double vacant_mbps = 14.0;
    double congested_mbps = 4.0;
    double noise_std_mbps = 1.0;

    void validate() const;
  };

  explicit ChannelEnv(Params params);

  int best_channel(std::uint64_t t) const;

  // Gaussian throughput draw around the channel's current mean, clamped at
  // zero; advances one cycle.
  ThroughputSample step(int channel, Rng& rng);

  std::uint64_t cycle() const { return cycle_; }
  const Params& params() const { return params_; }

 private:
  Params params_;
  std::uint64_t cycle_ = 0;
};

// Converts a throughput observation into a binary reward: reward iff the
// observation strictly exceeds the mean of everything seen before it. An
// empty history grants the reward.
class RewardRule {
 public:
  enum class Mode { cumulative, windowed };

  RewardRule() = default;
  static RewardRule windowed(std::uint32_t window);

  bool reward(const ThroughputSample& obs);

  double history_mean() const;
  std::uint64_t count() const { return count_; }
  Mode mode() const { return mode_; }

 private:
  Mode mode_ = Mode::cumulative;
  std::uint32_t window_ = 0;
  double sum_ = 0.0;
  std::uint64_t count_ = 0;
  std::deque<double> recent_;  // windowed mode only
};

}  // namespace chaosmab
