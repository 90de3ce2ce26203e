#include "chaosmab/decision.hpp"

#include <algorithm>
#include <cmath>

#include "chaosmab/errors.hpp"

namespace chaosmab {

void OmegaStrategy::validate() const {
  if (!(fixed_value > 0.0)) throw ConfigError("omega.fixed_value: must be positive");
  if (!(omega_max >= fixed_value))
    throw ConfigError("omega.omega_max: must be >= omega.fixed_value");
}

double omega(const OmegaStrategy& strategy, double p0_hat, double p1_hat) {
  if (strategy.mode == OmegaStrategy::Mode::fixed) return strategy.fixed_value;
  const double sum = p0_hat + p1_hat;
  if (sum >= 2.0)
    throw DataError("flexible omega undefined: estimated reward probabilities sum to 2");
  return std::min(sum / (2.0 - sum), strategy.omega_max);
}

void RewardEstimates::update(std::size_t arm, bool rewarded) {
  if (arm >= p_hat.size()) throw ConfigError("arm index out of range");
  const double target = rewarded ? 1.0 : 0.0;
  for (std::size_t i = 0; i < p_hat.size(); ++i) {
    // chosen arm tracks the observed reward; the rest age toward zero
    p_hat[i] = (1.0 - beta) * p_hat[i] + (i == arm ? beta * target : 0.0);
  }
}

ThresholdTree::ThresholdTree(std::uint32_t depth, double alpha, CalibrationStats level_scale)
    : depth_(depth), alpha_(alpha), level_scale_(level_scale) {
  if (depth_ < 1 || depth_ > 20) throw ConfigError("depth: must be in [1, 20]");
  if (!(alpha_ > 0.0 && alpha_ <= 1.0)) throw ConfigError("alpha: must be in (0, 1]");
  nodes_.assign((std::size_t{1} << depth_) - 1, 0.0);
}

int ThresholdTree::quantize_level(double threshold) {
  const double magnitude = std::floor(std::abs(threshold) + 0.5);
  int level = static_cast<int>(threshold < 0.0 ? -magnitude : magnitude);
  return std::clamp(level, -2, 2);
}

double ThresholdTree::effective_threshold(std::size_t node_index) const {
  return level_scale_.quantiles[static_cast<std::size_t>(quantize_level(nodes_.at(node_index)) + 2)];
}

Decision ThresholdTree::decide(SignalSource& source) const {
  Decision decision;
  decision.bits.reserve(depth_);
  decision.samples_used.reserve(depth_);
  std::size_t prefix = 0;
  for (std::uint32_t level = 0; level < depth_; ++level) {
    const std::size_t index = (std::size_t{1} << level) - 1 + prefix;
    const SignalSample sample = source.next();
    const int bit = sample.value <= effective_threshold(index) ? 0 : 1;
    decision.bits.push_back(bit);
    decision.samples_used.push_back(sample);
    prefix = (prefix << 1) | static_cast<std::size_t>(bit);
  }
  decision.arm = static_cast<std::uint32_t>(prefix);
  return decision;
}

namespace {

// Estimate for one alternative of a node: the best estimated arm in the
// subtree hanging off that branch (collapses to the arm itself at the leaves).
double branch_estimate(const RewardEstimates& estimates, std::uint32_t tree_depth,
                       std::uint32_t level, std::size_t prefix, int branch_bit) {
  const std::uint32_t below = tree_depth - level - 1;
  const std::size_t first = ((prefix << 1) | static_cast<std::size_t>(branch_bit)) << below;
  const std::size_t count = std::size_t{1} << below;
  double best = estimates.p_hat.at(first);
  for (std::size_t arm = first + 1; arm < first + count; ++arm)
    best = std::max(best, estimates.p_hat.at(arm));
  return best;
}

}  // namespace

void ThresholdTree::update(const Decision& decision, bool rewarded,
                           const OmegaStrategy& strategy, const RewardEstimates& estimates) {
  if (decision.bits.size() != depth_)
    throw ConfigError("decision depth does not match tree depth");
  std::size_t prefix = 0;
  for (std::uint32_t level = 0; level < depth_; ++level) {
    const std::size_t index = (std::size_t{1} << level) - 1 + prefix;
    const int bit = decision.bits[level];
    double magnitude;
    if (rewarded) {
      magnitude = 1.0;
    } else if (strategy.mode == OmegaStrategy::Mode::fixed) {
      magnitude = strategy.fixed_value;
    } else {
      magnitude = omega(strategy, branch_estimate(estimates, depth_, level, prefix, 0),
                        branch_estimate(estimates, depth_, level, prefix, 1));
    }
    // reward pulls toward the taken branch, a miss pushes away from it
    const double delta = (bit == 0) == rewarded ? magnitude : -magnitude;
    nodes_[index] = alpha_ * nodes_[index] + delta;
    prefix = (prefix << 1) | static_cast<std::size_t>(bit);
  }
}

}  // namespace chaosmab
