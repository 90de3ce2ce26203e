// Acceptance suite: end-to-end checks of the published study results and the
// simulator's contracts, one pass/fail line each. Exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chaosmab/cli.hpp"
#include "chaosmab/config.hpp"
#include "chaosmab/decision.hpp"
#include "chaosmab/environment.hpp"
#include "chaosmab/harness.hpp"
#include "chaosmab/rng.hpp"
#include "chaosmab/signal.hpp"

using namespace chaosmab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

ExperimentConfig problem_config(double p0, double p1, double alpha, bool flexible,
                                std::uint64_t seed = 1) {
  ExperimentConfig config = ExperimentConfig::defaults(ExperimentKind::bandit);
  config.bandit.p0 = p0;
  config.bandit.p1 = p1;
  config.alpha = alpha;
  config.omega.mode = flexible ? OmegaStrategy::Mode::flexible : OmegaStrategy::Mode::fixed;
  config.master_seed = seed;
  return config;
}

double fixed_csr(double p0, double p1, double alpha) {
  return run_bandit_experiment(problem_config(p0, p1, alpha, false)).average_csr;
}

// criterion 1: Problem 1, fixed omega, alpha 0.9 -> average CSR >= 0.95,
// at 1,000 repetitions of 10,000 cycles, in under a minute.
void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const double csr = fixed_csr(0.1, 0.9, 0.9);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(1, "problem 1 fixed-omega CSR near unity", csr >= 0.95 && seconds < 60.0,
         "csr=" + fmt(csr) + " >= 0.95, runtime=" + fmt(seconds) + "s");
}

// criterion 2: Problem 1, fixed beats flexible by more than two
// repetition-level standard errors at both forgetting rates.
void criterion_2() {
  for (double alpha : {0.9, 0.99}) {
    const ExperimentConfig fixed = problem_config(0.1, 0.9, alpha, false);
    ExperimentConfig flexible = fixed;
    flexible.omega.mode = OmegaStrategy::Mode::flexible;
    const StrategyComparison cmp = compare_strategies(fixed, flexible);
    const bool ok = cmp.difference > 2.0 * cmp.se_difference;
    report(2, "problem 1 fixed > flexible, alpha " + fmt(alpha), ok,
           "diff=" + fmt(cmp.difference) + " se=" + fmt(cmp.se_difference) + " fixed=" +
               fmt(cmp.average_csr_a) + " flexible=" + fmt(cmp.average_csr_b));
  }
}

// criterion 3: Problem 2 fixed CSR >= 0.90 at alpha 0.9; at alpha 0.99 fixed
// still beats flexible by more than two standard errors.
void criterion_3() {
  const double csr = fixed_csr(0.5, 0.9, 0.9);
  report(3, "problem 2 fixed-omega CSR at alpha 0.9", csr >= 0.90,
         "csr=" + fmt(csr) + " >= 0.90");

  const ExperimentConfig fixed = problem_config(0.5, 0.9, 0.99, false);
  ExperimentConfig flexible = fixed;
  flexible.omega.mode = OmegaStrategy::Mode::flexible;
  const StrategyComparison cmp = compare_strategies(fixed, flexible);
  const bool ok = cmp.difference > 2.0 * cmp.se_difference;
  report(3, "problem 2 fixed > flexible at alpha 0.99", ok,
         "diff=" + fmt(cmp.difference) + " se=" + fmt(cmp.se_difference));
}

// criterion 4: Problem 3 is hard for the fixed strategy: its CSR trails the
// same-alpha Problem 2 CSR by at least 0.10 at both forgetting rates.
void criterion_4() {
  for (double alpha : {0.9, 0.99}) {
    const double p3 = fixed_csr(0.1, 0.2, alpha);
    const double p2 = fixed_csr(0.5, 0.9, alpha);
    report(4, "problem 3 trails problem 2, alpha " + fmt(alpha), p3 <= p2 - 0.10,
           "p3=" + fmt(p3) + " p2=" + fmt(p2));
  }
}

// criteria 5 and 6: channel selection locks onto the rotating best channel in
// the back half of every block (>= 70% over 100 runs) and the logged
// throughput there clears 10 Mbps.
void criteria_5_and_6() {
  ExperimentConfig config = ExperimentConfig::defaults(ExperimentKind::channel);
  config.repetitions = 100;
  config.master_seed = 1;
  const RunResult result = run_channel_experiment(config);

  bool chosen_ok = true;
  bool throughput_ok = true;
  std::string chosen_detail;
  std::string throughput_detail;
  const std::uint32_t block = config.channel.model.block_length;
  for (int b = 0; b < 4; ++b) {
    const std::uint64_t lo = static_cast<std::uint64_t>(b) * block + 25;
    const std::uint64_t hi = static_cast<std::uint64_t>(b + 1) * block;
    double hit = 0.0;
    for (std::uint64_t t = lo; t < hi; ++t) hit += result.per_cycle_csr[t];
    hit /= static_cast<double>(hi - lo);
    double mbps = 0.0;
    std::uint64_t n = 0;
    for (const auto& log : result.selection_logs) {
      for (std::uint64_t t = lo; t < hi; ++t) {
        mbps += log[t].throughput_mbps;
        ++n;
      }
    }
    mbps /= static_cast<double>(n);
    chosen_ok = chosen_ok && hit >= 0.70;
    throughput_ok = throughput_ok && mbps > 10.0;
    chosen_detail += (b ? " " : "") + fmt(hit);
    throughput_detail += (b ? " " : "") + fmt(mbps);
  }
  report(5, "best channel chosen in cycles 25-49 of each block", chosen_ok,
         "rates=" + chosen_detail + " >= 0.70");
  report(6, "mean throughput in cycles 25-49 of each block", throughput_ok,
         "mbps=" + throughput_detail + " > 10");
}

// criterion 7: invariant sweep. Each sub-check is tagged in the detail line.
void criterion_7() {
  std::vector<std::string> failed;

  // threshold boundedness under alpha 0.9, omega 1
  {
    SourceSpec spec;
    spec.kind = SourceKind::uniform;
    SignalSource src = open_source(spec, 1);
    ThresholdTree tree(2, 0.9, src.calibrate(5000));
    Rng rng(2);
    bool ok = true;
    for (int step = 0; step < 100000 && ok; ++step) {
      const Decision d = tree.decide(src);
      tree.update(d, rng.bernoulli(0.5), OmegaStrategy{}, RewardEstimates(4));
      for (std::size_t node = 0; node < tree.node_count(); ++node)
        ok = ok && std::abs(tree.node_value(node)) <= 10.0 + 1e-9;
    }
    if (!ok) failed.push_back("boundedness");
  }

  // path locality
  {
    SourceSpec spec;
    spec.kind = SourceKind::uniform;
    SignalSource src = open_source(spec, 3);
    ThresholdTree tree(3, 0.9, src.calibrate(5000));
    Rng rng(4);
    bool ok = true;
    for (int step = 0; step < 5000 && ok; ++step) {
      const auto before = tree.node_values();
      const Decision d = tree.decide(src);
      tree.update(d, rng.bernoulli(0.5), OmegaStrategy{}, RewardEstimates(8));
      std::set<std::size_t> path;
      std::size_t prefix = 0;
      for (std::uint32_t level = 0; level < 3; ++level) {
        path.insert((std::size_t{1} << level) - 1 + prefix);
        prefix = (prefix << 1) | static_cast<std::size_t>(d.bits[level]);
      }
      for (std::size_t node = 0; node < tree.node_count(); ++node) {
        if (!path.count(node) && tree.node_value(node) != before[node]) ok = false;
      }
    }
    if (!ok) failed.push_back("path-locality");
  }

  // boundary rule: a sample equal to the effective threshold gives bit 0
  {
    CalibrationStats scale;
    scale.quantiles = {10.0, 60.0, 128.0, 200.0, 250.0};
    scale.sample_count = 1000;
    ThresholdTree tree(1, 0.9, scale);
    const fs::path dir = fs::temp_directory_path() / "chaosmab_acceptance";
    fs::create_directories(dir);
    const std::string path = (dir / "boundary.chaos").string();
    write_trace(path, {128}, 10);
    SourceSpec spec;
    spec.kind = SourceKind::trace;
    spec.trace_path = path;
    SignalSource src = open_source(spec, 1);
    if (tree.decide(src).bits[0] != 0) failed.push_back("boundary-rule");
  }

  // flexible -> fixed reduction when the frozen estimates sum to 1
  {
    SourceSpec spec;
    spec.kind = SourceKind::uniform;
    const CalibrationStats scale = open_source(spec, 5).calibrate(5000);
    ThresholdTree a(1, 0.9, scale);
    ThresholdTree b(1, 0.9, scale);
    SignalSource sa = open_source(spec, 6);
    SignalSource sb = open_source(spec, 6);
    Rng rng(7);
    OmegaStrategy flexible;
    flexible.mode = OmegaStrategy::Mode::flexible;
    const RewardEstimates frozen(2, 0.02, 0.5);
    bool ok = true;
    for (int t = 0; t < 20000 && ok; ++t) {
      const Decision da = a.decide(sa);
      const Decision db = b.decide(sb);
      const bool rewarded = rng.bernoulli(0.3);
      a.update(da, rewarded, OmegaStrategy{}, frozen);
      b.update(db, rewarded, flexible, frozen);
      ok = da.arm == db.arm && a.node_values() == b.node_values();
    }
    if (!ok) failed.push_back("flexible-reduction");
  }

  // five-level quantization
  {
    SourceSpec spec;
    spec.kind = SourceKind::logistic;
    const CalibrationStats scale = open_source(spec, 8).calibrate(5000);
    ThresholdTree tree(1, 0.9, scale);
    Rng rng(9);
    bool ok = true;
    for (int i = 0; i < 5000 && ok; ++i) {
      tree.set_node_value(0, 60.0 * (rng.next_double() - 0.5));
      const double eff = tree.effective_threshold(0);
      ok = std::find(scale.quantiles.begin(), scale.quantiles.end(), eff) !=
           scale.quantiles.end();
    }
    if (!ok) failed.push_back("five-level");
  }

  // exact running mean vs brute force
  {
    RewardRule rule;
    Rng rng(10);
    std::vector<double> seen;
    bool ok = true;
    for (int i = 0; i < 1000 && ok; ++i) {
      const double v = 20.0 * rng.next_double();
      (void)rule.reward(ThroughputSample{36, v, static_cast<std::uint64_t>(i)});
      seen.push_back(v);
      double sum = 0.0;
      for (double s : seen) sum += s;
      ok = rule.history_mean() == sum / static_cast<double>(seen.size());
    }
    if (!ok) failed.push_back("running-mean");
  }

  // ar1 autocorrelation within 0.01
  {
    SourceSpec spec;
    spec.kind = SourceKind::ar1;
    spec.ar1_phi = -0.6;
    const auto acf = open_source(spec, 11).autocorrelation(1000000, 2);
    if (!(std::abs(acf[0] + 0.6) < 0.01 && std::abs(acf[1] - 0.36) < 0.01))
      failed.push_back("ar1-acf");
  }

  // uniform-random baseline CSR 0.5 +- 0.01
  {
    ExperimentConfig config = problem_config(0.1, 0.9, 0.9, false);
    config.source.kind = SourceKind::uniform;
    config.freeze_thresholds = true;
    const double csr = run_bandit_experiment(config).average_csr;
    if (!(std::abs(csr - 0.5) < 0.01)) failed.push_back("uniform-baseline");
  }

  std::string detail = "boundedness, path-locality, boundary-rule, flexible-reduction, "
                       "five-level, running-mean, ar1-acf, uniform-baseline";
  if (!failed.empty()) {
    detail = "failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  report(7, "invariant suites", failed.empty(), detail);
}

// criterion 8: identical invocations produce byte-identical files, for every
// subcommand and independent of the harness thread count.
void criterion_8() {
  const fs::path dir = fs::temp_directory_path() / "chaosmab_acceptance" / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  auto write = [](const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
  };

  write(dir / "bandit.json",
        R"({"experiment":"bandit","repetitions":60,"cycles":1500,"master_seed":5,"calibration_samples":2000})");
  write(dir / "channel.json",
        R"({"experiment":"channel","repetitions":4,"master_seed":5,"calibration_samples":2000})");
  write(dir / "signal.json", R"({"source":{"kind":"logistic"},"master_seed":6})");
  write(dir / "raw.bin", std::string(4096, 'x') + "chaos");

  bool ok = true;
  std::string detail;

  struct Invocation {
    std::string name;
    std::vector<std::string> args_a;
    std::vector<std::string> args_b;
    std::vector<std::string> files;
  };
  const std::vector<Invocation> invocations = {
      {"simulate-bandit",
       {"simulate-bandit", "--config", (dir / "bandit.json").string(), "--out-dir",
        (dir / "b1").string(), "--threads", "1"},
       {"simulate-bandit", "--config", (dir / "bandit.json").string(), "--out-dir",
        (dir / "b2").string(), "--threads", "4"},
       {"csr_curve.csv", "summary.json"}},
      {"simulate-channel",
       {"simulate-channel", "--config", (dir / "channel.json").string(), "--out-dir",
        (dir / "c1").string(), "--threads", "1"},
       {"simulate-channel", "--config", (dir / "channel.json").string(), "--out-dir",
        (dir / "c2").string(), "--threads", "4"},
       {"selection_log.csv", "summary.json"}},
      {"analyze-signal",
       {"analyze-signal", "--config", (dir / "signal.json").string(), "--out-dir",
        (dir / "s1").string(), "--samples", "200000", "--max-lag", "8"},
       {"analyze-signal", "--config", (dir / "signal.json").string(), "--out-dir",
        (dir / "s2").string(), "--samples", "200000", "--max-lag", "8"},
       {"acf.csv"}},
      {"convert-trace",
       {"convert-trace", "--input", (dir / "raw.bin").string(), "--output",
        (dir / "t1.chaos").string()},
       {"convert-trace", "--input", (dir / "raw.bin").string(), "--output",
        (dir / "t2.chaos").string()},
       {}},
  };

  for (const auto& inv : invocations) {
    if (run_cli(inv.args_a) != 0 || run_cli(inv.args_b) != 0) {
      ok = false;
      detail += inv.name + ":exit ";
      continue;
    }
    if (inv.name == "convert-trace") {
      if (slurp(dir / "t1.chaos") != slurp(dir / "t2.chaos")) {
        ok = false;
        detail += "convert-trace:payload ";
      }
      continue;
    }
    const fs::path out_a = inv.args_a[4];
    const fs::path out_b = inv.args_b[4];
    for (const auto& file : inv.files) {
      if (slurp(out_a / file) != slurp(out_b / file)) {
        ok = false;
        detail += inv.name + ":" + file + " ";
      }
    }
  }
  if (ok) detail = "all subcommand outputs byte-identical across reruns and thread counts";
  report(8, "deterministic outputs", ok, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criteria_5_and_6();
  criterion_7();
  criterion_8();
  if (failures) {
    std::printf("%d criterion check(s) FAILED\n", failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
