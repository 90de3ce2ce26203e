"""Smoke tests for the Python bindings."""

import json

import pytest

import chaosmab as cm


def make_uniform_source(seed=7):
    spec = cm.SourceSpec()
    spec.kind = cm.SourceKind.uniform
    return cm.open_source(spec, seed)


def test_version_strings():
    assert cm.__version__
    assert cm.BUILD_ID.endswith(cm.__version__)


def test_signal_source_round_trip():
    src = make_uniform_source()
    twin = make_uniform_source()
    codes = [src.next().raw for _ in range(256)]
    assert codes == [twin.next().raw for _ in range(256)]
    assert all(0 <= c <= 255 for c in codes)

    stats = src.calibrate(5000)
    assert list(stats.quantiles) == sorted(stats.quantiles)
    assert stats.sample_count == 5000


def test_invalid_source_raises_config_error():
    spec = cm.SourceSpec()
    spec.kind = cm.SourceKind.ar1
    spec.ar1_phi = 1.0
    with pytest.raises(cm.ConfigError):
        cm.open_source(spec, 1)


def test_decide_and_update_cascade():
    src = make_uniform_source()
    tree = cm.ThresholdTree(2, 0.9, src.calibrate(5000))
    estimates = cm.RewardEstimates(4)
    strategy = cm.OmegaStrategy()

    decision = tree.decide(src)
    assert 0 <= decision.arm <= 3
    assert len(decision.bits) == 2
    assert decision.arm == (decision.bits[0] << 1) | decision.bits[1]

    before = list(tree.node_values())
    tree.update(decision, True, strategy, estimates)
    after = list(tree.node_values())
    changed = sum(1 for b, a in zip(before, after) if b != a)
    assert changed == 2  # exactly the two on-path nodes


def test_omega_formula():
    flexible = cm.OmegaStrategy()
    flexible.mode = cm.OmegaStrategy.Mode.flexible
    assert cm.omega(flexible, 0.5, 0.5) == pytest.approx(1.0)
    assert cm.omega(flexible, 0.5, 0.9) == pytest.approx(1.4 / 0.6)


def test_bandit_experiment_runs_and_is_deterministic():
    config = cm.ExperimentConfig.defaults(cm.ExperimentKind.bandit)
    config.repetitions = 20
    config.cycles = 500
    config.calibration_samples = 2000
    config.master_seed = 13

    a = cm.run_bandit_experiment(config, 1)
    b = cm.run_bandit_experiment(config, 2)
    assert a.average_csr == b.average_csr
    assert list(a.per_cycle_csr) == list(b.per_cycle_csr)
    assert all(0.0 <= v <= 1.0 for v in a.per_cycle_csr)
    assert len(a.per_rep_csr) == 20
    assert "logistic" in a.config


def test_channel_experiment_logs_every_cycle():
    config = cm.ExperimentConfig.defaults(cm.ExperimentKind.channel)
    config.calibration_samples = 2000
    result = cm.run_channel_experiment(config)
    assert len(result.selection_logs) == 1
    log = result.selection_logs[0]
    assert len(log) == 200
    assert {rec.channel for rec in log} <= {36, 40, 44, 48}


def test_config_json_round_trip():
    config = cm.ExperimentConfig.defaults(cm.ExperimentKind.bandit)
    doc = json.loads(config.to_json())
    assert doc["experiment"] == "bandit"
    parsed = cm.ExperimentConfig.from_json(config.to_json(), ["bandit.p0=0.4"])
    assert json.loads(parsed.to_json())["bandit"]["p0"] == 0.4
    with pytest.raises(cm.ConfigError):
        cm.ExperimentConfig.from_json("{\"nope\": 1}")


def test_cli_in_process(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "experiment": "bandit",
        "repetitions": 5,
        "cycles": 200,
        "calibration_samples": 2000,
    }))
    out = tmp_path / "out"
    assert cm.run_cli(["simulate-bandit", "--config", str(config), "--out-dir", str(out)]) == 0
    assert (out / "csr_curve.csv").exists()
    assert (out / "summary.json").exists()
    assert cm.run_cli(["simulate-bandit", "--config", str(config), "--set", "bogus=1"]) == 2
