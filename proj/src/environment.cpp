#include "chaosmab/environment.hpp"

#include <algorithm>
#include <numeric>

#include "chaosmab/errors.hpp"

namespace chaosmab {

SwitchingBernoulliEnv::SwitchingBernoulliEnv(double p0, double p1, std::uint32_t swap_period)
    : p0_(p0), p1_(p1), swap_period_(swap_period) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ConfigError("bandit.p0: must be in [0, 1]");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw ConfigError("bandit.p1: must be in [0, 1]");
  if (swap_period_ < 1) throw ConfigError("bandit.swap_period: must be >= 1");
}

std::pair<double, double> SwitchingBernoulliEnv::effective_probs(std::uint64_t t) const {
  const bool swapped = (t / swap_period_) % 2 == 1;
  return swapped ? std::pair{p1_, p0_} : std::pair{p0_, p1_};
}

bool SwitchingBernoulliEnv::pull(int arm, Rng& rng) {
  if (arm != 0 && arm != 1) throw ConfigError("bandit arm must be 0 or 1");
  const auto [e0, e1] = effective_probs(cycle_);
  ++cycle_;
  return rng.bernoulli(arm == 0 ? e0 : e1);
}

void ChannelEnv::Params::validate() const {
  if (channels.empty()) throw ConfigError("channel.channels: must not be empty");
  if (best_sequence.empty()) throw ConfigError("channel.best_sequence: must not be empty");
  for (int ch : best_sequence) {
    if (std::find(channels.begin(), channels.end(), ch) == channels.end())
      throw ConfigError("channel.best_sequence: channel " + std::to_string(ch) +
                        " is not in channel.channels");
  }
  if (block_length < 1) throw ConfigError("channel.block_length: must be >= 1");
  if (!(vacant_mbps > 0.0)) throw ConfigError("channel.vacant_mbps: must be positive");
  if (!(congested_mbps > 0.0)) throw ConfigError("channel.congested_mbps: must be positive");
  if (!(noise_std_mbps >= 0.0)) throw ConfigError("channel.noise_std_mbps: must be >= 0");
}

ChannelEnv::ChannelEnv(Params params) : params_(std::move(params)) { params_.validate(); }

int ChannelEnv::best_channel(std::uint64_t t) const {
  // last block's winner persists past the end of the schedule
  const std::uint64_t block = t / params_.block_length;
  const std::size_t index =
      std::min<std::uint64_t>(block, params_.best_sequence.size() - 1);
  return params_.best_sequence[static_cast<std::size_t>(index)];
}

ThroughputSample ChannelEnv::step(int channel, Rng& rng) {
  if (std::find(params_.channels.begin(), params_.channels.end(), channel) ==
      params_.channels.end())
    throw ConfigError("unknown channel identity: " + std::to_string(channel));
  const double mean =
      channel == best_channel(cycle_) ? params_.vacant_mbps : params_.congested_mbps;
  const double mbps = std::max(0.0, mean + params_.noise_std_mbps * rng.next_gaussian());
  ThroughputSample sample{channel, mbps, cycle_};
  ++cycle_;
  return sample;
}

RewardRule RewardRule::windowed(std::uint32_t window) {
  if (window < 1) throw ConfigError("channel.reward_window: must be >= 1");
  RewardRule rule;
  rule.mode_ = Mode::windowed;
  rule.window_ = window;
  return rule;
}

double RewardRule::history_mean() const {
  if (mode_ == Mode::cumulative)
    return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_);
  if (recent_.empty()) return 0.0;
  const double sum = std::accumulate(recent_.begin(), recent_.end(), 0.0);
  return sum / static_cast<double>(recent_.size());
}

bool RewardRule::reward(const ThroughputSample& obs) {
  if (!(obs.mbps >= 0.0)) throw DataError("throughput observation must be >= 0");
  // strictly greater than the mean of prior observations; empty history wins
  const bool rewarded = count_ == 0 || obs.mbps > history_mean();
  sum_ += obs.mbps;
  ++count_;
  if (mode_ == Mode::windowed) {
    recent_.push_back(obs.mbps);
    if (recent_.size() > window_) recent_.pop_front();
  }
  return rewarded;
}

}  // namespace chaosmab
