#pragma once

#include <cstdint>
#include <vector>

#include "chaosmab/signal.hpp"

namespace chaosmab {

// Penalty-side step size policy.
struct OmegaStrategy {
  enum class Mode { fixed, flexible };
  Mode mode = Mode::fixed;
  double fixed_value = 1.0;
  double omega_max = 20.0;

  void validate() const;
};

// Penalty magnitude for a two-alternative node. Fixed mode ignores the
// estimates; flexible mode returns (p0+p1) / (2-(p0+p1)) clamped at omega_max.
double omega(const OmegaStrategy& strategy, double p0_hat, double p1_hat);

// Exponentially weighted per-arm reward-rate estimates. The chosen arm moves
// toward the observed reward; every other arm decays toward zero, so stale
// estimates age out instead of freezing at their last value.
struct RewardEstimates {
  std::vector<double> p_hat;
  double beta = 0.02;

  RewardEstimates() = default;
  explicit RewardEstimates(std::size_t arms, double beta_ = 0.02, double initial = 0.5)
      : p_hat(arms, initial), beta(beta_) {}

  void update(std::size_t arm, bool rewarded);
};

struct Decision {
  std::uint32_t arm = 0;
  std::vector<int> bits;                   // MSB first, one per level
  std::vector<SignalSample> samples_used;  // one per level
};

// Depth-M cascade of real-valued thresholds, one comparison per bit, MSB
// first. Node values are quantized to five effective levels through the
// shared calibration quantiles. Nodes are stored in heap order: the root is
// index 0 and the node reached by bit-path p at level l is (1<<l)-1+p.
class ThresholdTree {
 public:
  ThresholdTree(std::uint32_t depth, double alpha, CalibrationStats level_scale);

  std::uint32_t depth() const { return depth_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t arm_count() const { return std::size_t{1} << depth_; }
  double alpha() const { return alpha_; }
  const CalibrationStats& level_scale() const { return level_scale_; }

  double node_value(std::size_t index) const { return nodes_.at(index); }
  void set_node_value(std::size_t index, double value) { nodes_.at(index) = value; }
  const std::vector<double>& node_values() const { return nodes_; }

  // round-half-away-from-zero, clamped to [-2, +2].
  static int quantize_level(double threshold);

  double effective_threshold(std::size_t node_index) const;

  // Consumes exactly depth() samples; sample <= effective threshold gives
  // bit 0, which selects the left child for the next comparison.
  Decision decide(SignalSource& source) const;

  // Applies TH <- alpha*TH + delta to the nodes on the decision's bit path
  // and nothing else. Reward pulls the threshold toward the taken branch in
  // unit steps; a miss pushes it away by the strategy's omega.
  void update(const Decision& decision, bool rewarded, const OmegaStrategy& strategy,
              const RewardEstimates& estimates);

 private:
  std::uint32_t depth_;
  double alpha_;
  CalibrationStats level_scale_;
  std::vector<double> nodes_;
};

}  // namespace chaosmab
