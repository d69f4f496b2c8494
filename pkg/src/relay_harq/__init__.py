"""Distributed timer-based relay selection for incremental-redundancy HARQ
over Rayleigh block fading: closed-form attempt statistics, timer-class
policy optimization, and a reproducible Monte Carlo round simulator.
"""

from .channel import (
    INFEASIBLE,
    AttemptPmf,
    ChannelGain,
    FadingParams,
    attempt_pmf,
    joint_pmf,
    mutual_info_per_symbol,
    required_attempts,
    sample_gain_sq,
)
from .policy import (
    AlphaMatrix,
    ClassPartition,
    NoFeasibleConfigError,
    Objective,
    PolicyEvaluation,
    class_select_probs,
    evaluate_policy,
    expected_delay,
    optimize_alpha,
    partition_classes,
    throughput,
)
from .simulator import (
    RelayNode,
    RoundOutcome,
    Scheme,
    SimConfig,
    TrialAggregate,
    run_round_fdfr,
    run_round_optimal,
    run_round_proposed,
    run_trials,
    sample_round_relays,
)

__all__ = [
    "INFEASIBLE",
    "AttemptPmf",
    "ChannelGain",
    "FadingParams",
    "attempt_pmf",
    "joint_pmf",
    "mutual_info_per_symbol",
    "required_attempts",
    "sample_gain_sq",
    "AlphaMatrix",
    "ClassPartition",
    "NoFeasibleConfigError",
    "Objective",
    "PolicyEvaluation",
    "class_select_probs",
    "evaluate_policy",
    "expected_delay",
    "optimize_alpha",
    "partition_classes",
    "throughput",
    "RelayNode",
    "RoundOutcome",
    "Scheme",
    "SimConfig",
    "TrialAggregate",
    "run_round_fdfr",
    "run_round_optimal",
    "run_round_proposed",
    "run_trials",
    "sample_round_relays",
]

__version__ = "0.1.0"
