"""Chaos-signal-driven multi-armed bandit decision making.

Thin Python surface over the C++ core: signal sources, the threshold-cascade
decision maker, the bandit/channel environments, and the experiment harness.
"""

from chaosmab._core import (
    BUILD_ID,
    CalibrationStats,
    ChannelEnv,
    ConfigError,
    DataError,
    Decision,
    ExperimentConfig,
    ExperimentKind,
    OmegaStrategy,
    RewardEstimates,
    RewardRule,
    Rng,
    RunResult,
    SelectionRecord,
    SignalSample,
    SignalSource,
    SourceKind,
    SourceSpec,
    StrategyComparison,
    SwitchingBernoulliEnv,
    ThresholdTree,
    ThroughputSample,
    WrapPolicy,
    __version__,
    compare_strategies,
    derive_seed,
    omega,
    open_source,
    run_bandit_experiment,
    run_channel_experiment,
    run_cli,
)

__all__ = [
    "BUILD_ID",
    "CalibrationStats",
    "ChannelEnv",
    "ConfigError",
    "DataError",
    "Decision",
    "ExperimentConfig",
    "ExperimentKind",
    "OmegaStrategy",
    "RewardEstimates",
    "RewardRule",
    "Rng",
    "RunResult",
    "SelectionRecord",
    "SignalSample",
    "SignalSource",
    "SourceKind",
    "SourceSpec",
    "StrategyComparison",
    "SwitchingBernoulliEnv",
    "ThresholdTree",
    "ThroughputSample",
    "WrapPolicy",
    "__version__",
    "compare_strategies",
    "derive_seed",
    "omega",
    "open_source",
    "run_bandit_experiment",
    "run_channel_experiment",
    "run_cli",
]
