#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "chaosmab/rng.hpp"

namespace chaosmab {

// One sample of the decision-driving sequence: an 8-bit amplitude code.
struct SignalSample {
  int raw = 0;        // in [0, 255]
  double value = 0.0; // == raw, as a real number
};

enum class SourceKind { trace, logistic, tent, ar1, uniform };
enum class WrapPolicy { wrap, error };

struct SourceSpec {
  SourceKind kind = SourceKind::logistic;
  std::string trace_path;        // trace only
  double logistic_r = 4.0;       // fully chaotic regime
  double tent_slope = 1.9999;
  double ar1_phi = -0.6;
  double ar1_noise_std = 1.0;
  std::uint32_t stride = 1;      // samples advanced per read
  WrapPolicy wrap_policy = WrapPolicy::wrap;

  void validate() const;  // throws ConfigError
};

// Sidecar metadata for a `.chaos` trace payload.
struct TraceHeader {
  std::uint64_t sample_interval_ps = 10;
  int resolution_bits = 8;
  std::uint64_t length = 0;
};

// Empirical quantiles of the source at the five threshold levels.
struct CalibrationStats {
  std::array<double, 5> quantiles{};
  std::uint64_t sample_count = 0;
};

// Cumulative probabilities of the five quantized threshold levels -2..+2.
// The outer levels are nearly decisive so a saturated threshold pins its bit,
// the way a full-range amplitude comparison does; inner levels split the
// remaining mass evenly.
inline constexpr std::array<double, 5> kLevelProbs = {1.0 / 64, 0.25, 0.5, 0.75, 63.0 / 64};

// Stateful scalar sequence: recorded trace replay or a synthetic generator.
// Fully determined by (spec, seed). Single-owner; copies are independent.
class SignalSource {
 public:
  SignalSample next();

  // Quantiles from a fresh copy of this source; never advances this cursor.
  CalibrationStats calibrate(std::uint64_t n) const;

  // Normalized sample autocorrelation at lags 1..max_lag over a fresh copy.
  std::vector<double> autocorrelation(std::uint64_t n, std::uint32_t max_lag) const;

  // Fresh copy rewound to sample 0.
  SignalSource restarted() const;

  const SourceSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

 private:
  friend SignalSource open_source(const SourceSpec& spec, std::uint64_t seed);

  SignalSource(SourceSpec spec, std::uint64_t seed);
  int generate_code();
  void advance_generator();

  SourceSpec spec_;
  std::uint64_t seed_ = 0;
  Rng rng_;
  std::shared_ptr<const std::vector<std::uint8_t>> payload_;  // trace only
  std::uint64_t cursor_ = 0;
  double state_ = 0.0;    // logistic/tent/ar1 iterate
  double ar1_limit_ = 0.0;  // clip at 4 stationary standard deviations
};

SignalSource open_source(const SourceSpec& spec, std::uint64_t seed);

// `.chaos` payload + `.chaos.meta` sidecar I/O. Loaders reject mismatches.
TraceHeader read_trace_header(const std::string& chaos_path);
std::vector<std::uint8_t> read_trace_payload(const std::string& chaos_path);
void write_trace(const std::string& chaos_path, const std::vector<std::uint8_t>& payload,
                 std::uint64_t sample_interval_ps);

}  // namespace chaosmab
