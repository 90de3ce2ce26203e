#include "chaosmab/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "chaosmab/errors.hpp"

namespace chaosmab {

namespace {

int round_half_up_code(double x) {
  double code = std::floor(x * 255.0 + 0.5);
  if (code < 0.0) code = 0.0;
  if (code > 255.0) code = 255.0;
  return static_cast<int>(code);
}

// Keeps chaotic iterates away from absorbing endpoints that floating point
// can land on exactly (e.g. logistic x=0.5 -> 1 -> 0).
double clamp_unit_open(double x) {
  return std::min(std::max(x, 1e-12), 1.0 - 1e-12);
}

}  // namespace

void SourceSpec::validate() const {
  if (stride < 1) throw ConfigError("source.stride: must be >= 1");
  switch (kind) {
    case SourceKind::trace:
      if (trace_path.empty()) throw ConfigError("source.path: required for kind=trace");
      break;
    case SourceKind::logistic:
      if (!(logistic_r > 0.0 && logistic_r <= 4.0))
        throw ConfigError("source.r: logistic parameter must be in (0, 4]");
      break;
    case SourceKind::tent:
      if (!(tent_slope > 0.0 && tent_slope <= 2.0))
        throw ConfigError("source.slope: tent slope must be in (0, 2]");
      break;
    case SourceKind::ar1:
      if (!(std::abs(ar1_phi) < 1.0))
        throw ConfigError("source.phi: ar1 coefficient must satisfy |phi| < 1");
      if (!(ar1_noise_std > 0.0))
        throw ConfigError("source.noise_std: must be positive");
      break;
    case SourceKind::uniform:
      break;
  }
}

SignalSource open_source(const SourceSpec& spec, std::uint64_t seed) {
  spec.validate();
  return SignalSource(spec, seed);
}

SignalSource::SignalSource(SourceSpec spec, std::uint64_t seed)
    : spec_(std::move(spec)), seed_(seed), rng_(seed) {
  switch (spec_.kind) {
    case SourceKind::trace: {
      auto payload = read_trace_payload(spec_.trace_path);
      payload_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(payload));
      break;
    }
    case SourceKind::logistic:
    case SourceKind::tent:
      state_ = 0.01 + 0.98 * rng_.next_double();
      break;
    case SourceKind::ar1: {
      const double stationary_std =
          spec_.ar1_noise_std / std::sqrt(1.0 - spec_.ar1_phi * spec_.ar1_phi);
      ar1_limit_ = 4.0 * stationary_std;
      state_ = stationary_std * rng_.next_gaussian();
      break;
    }
    case SourceKind::uniform:
      state_ = static_cast<double>(rng_.next_code());
      break;
  }
}

int SignalSource::generate_code() {
  switch (spec_.kind) {
    case SourceKind::logistic:
    case SourceKind::tent:
      return round_half_up_code(state_);
    case SourceKind::ar1: {
      const double clipped = std::min(std::max(state_, -ar1_limit_), ar1_limit_);
      return round_half_up_code((clipped + ar1_limit_) / (2.0 * ar1_limit_));
    }
    case SourceKind::uniform:
      return static_cast<int>(state_);
    case SourceKind::trace:
      break;
  }
  return 0;
}

void SignalSource::advance_generator() {
  switch (spec_.kind) {
    case SourceKind::logistic:
      state_ = clamp_unit_open(spec_.logistic_r * state_ * (1.0 - state_));
      break;
    case SourceKind::tent:
      state_ = clamp_unit_open(spec_.tent_slope * std::min(state_, 1.0 - state_));
      break;
    case SourceKind::ar1:
      state_ = spec_.ar1_phi * state_ + spec_.ar1_noise_std * rng_.next_gaussian();
      break;
    case SourceKind::uniform:
      state_ = static_cast<double>(rng_.next_code());
      break;
    case SourceKind::trace:
      break;
  }
}

SignalSample SignalSource::next() {
  int code;
  if (spec_.kind == SourceKind::trace) {
    const std::uint64_t length = payload_->size();
    if (cursor_ >= length) {
      // wrap policy keeps the cursor reduced below, so this is error-only
      throw DataError("trace exhausted at sample " + std::to_string(cursor_) + " of " +
                      std::to_string(length));
    }
    code = (*payload_)[static_cast<std::size_t>(cursor_)];
    cursor_ += spec_.stride;
    if (spec_.wrap_policy == WrapPolicy::wrap) cursor_ %= length;
  } else {
    code = generate_code();
    for (std::uint32_t i = 0; i < spec_.stride; ++i) advance_generator();
  }
  return SignalSample{code, static_cast<double>(code)};
}

SignalSource SignalSource::restarted() const {
  if (spec_.kind == SourceKind::trace) {
    SignalSource copy = *this;  // payload stays shared
    copy.cursor_ = 0;
    return copy;
  }
  return SignalSource(spec_, seed_);  // synthetic init is pure in (spec, seed)
}

CalibrationStats SignalSource::calibrate(std::uint64_t n) const {
  if (n < 1000) throw ConfigError("calibration sample count must be >= 1000");
  SignalSource fresh = restarted();
  std::vector<int> codes(static_cast<std::size_t>(n));
  for (auto& c : codes) c = fresh.next().raw;
  if (std::all_of(codes.begin(), codes.end(), [&](int c) { return c == codes.front(); }))
    throw DataError("calibration failed: source has zero variance");
  std::sort(codes.begin(), codes.end());
  CalibrationStats stats;
  stats.sample_count = n;
  for (std::size_t i = 0; i < kLevelProbs.size(); ++i) {
    // nearest-rank quantile
    auto rank = static_cast<std::uint64_t>(std::ceil(kLevelProbs[i] * static_cast<double>(n)));
    rank = std::clamp<std::uint64_t>(rank, 1, n);
    stats.quantiles[i] = static_cast<double>(codes[static_cast<std::size_t>(rank - 1)]);
  }
  return stats;
}

std::vector<double> SignalSource::autocorrelation(std::uint64_t n, std::uint32_t max_lag) const {
  if (max_lag < 1) throw ConfigError("max_lag must be >= 1");
  if (n <= 10ull * max_lag) throw ConfigError("sample count must exceed 10 * max_lag");
  SignalSource fresh = restarted();
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = fresh.next().value;

  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double var_sum = 0.0;
  for (double v : x) var_sum += (v - mean) * (v - mean);
  if (var_sum == 0.0) throw DataError("autocorrelation failed: zero variance over window");
  const double variance = var_sum / static_cast<double>(n);

  std::vector<double> acf(max_lag);
  for (std::uint32_t k = 1; k <= max_lag; ++k) {
    double cov = 0.0;
    for (std::size_t t = 0; t + k < x.size(); ++t) cov += (x[t] - mean) * (x[t + k] - mean);
    cov /= static_cast<double>(n - k);
    acf[k - 1] = cov / variance;
  }
  return acf;
}

TraceHeader read_trace_header(const std::string& chaos_path) {
  const std::string meta_path = chaos_path + ".meta";
  std::ifstream in(meta_path);
  if (!in) throw DataError("cannot open trace metadata: " + meta_path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw DataError("corrupt trace metadata " + meta_path + ": " + e.what());
  }
  TraceHeader header;
  try {
    header.sample_interval_ps = doc.at("sample_interval_ps").get<std::uint64_t>();
    header.resolution_bits = doc.at("resolution_bits").get<int>();
    header.length = doc.at("length").get<std::uint64_t>();
  } catch (const std::exception& e) {
    throw DataError("corrupt trace metadata " + meta_path + ": " + e.what());
  }
  if (header.resolution_bits != 8)
    throw DataError(meta_path + ": resolution_bits must be 8");
  if (header.length == 0) throw DataError(meta_path + ": length must be positive");
  if (header.sample_interval_ps == 0)
    throw DataError(meta_path + ": sample_interval_ps must be positive");
  return header;
}

std::vector<std::uint8_t> read_trace_payload(const std::string& chaos_path) {
  const TraceHeader header = read_trace_header(chaos_path);
  std::ifstream in(chaos_path, std::ios::binary);
  if (!in) throw DataError("cannot open trace payload: " + chaos_path);
  std::vector<std::uint8_t> payload((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
  if (payload.size() != header.length)
    throw DataError(chaos_path + ": payload has " + std::to_string(payload.size()) +
                    " bytes but metadata declares " + std::to_string(header.length));
  return payload;
}

void write_trace(const std::string& chaos_path, const std::vector<std::uint8_t>& payload,
                 std::uint64_t sample_interval_ps) {
  if (payload.empty()) throw DataError("trace payload must not be empty");
  if (sample_interval_ps == 0) throw DataError("sample_interval_ps must be positive");
  std::ofstream out(chaos_path, std::ios::binary);
  if (!out) throw DataError("cannot write trace payload: " + chaos_path);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  out.close();

  nlohmann::ordered_json meta;
  meta["sample_interval_ps"] = sample_interval_ps;
  meta["resolution_bits"] = 8;
  meta["length"] = payload.size();
  std::ofstream meta_out(chaos_path + ".meta");
  if (!meta_out) throw DataError("cannot write trace metadata: " + chaos_path + ".meta");
  meta_out << meta.dump(2) << '\n';
}

}  // namespace chaosmab
