"""Linear-optics simulation and optimization of heralded nonlinear sign gates."""

__version__ = "0.1.0"

from ._backend import BACKEND, COMPILED
from .analysis import (
    NS_TARGET,
    FailureStats,
    Outcome,
    OutcomeRecord,
    conditional_map,
    enumerate_outcomes,
    failure_stats,
    ideal_recovery_bound,
    max_success_ceiling,
)
from .fock import ConditionalMap, FockState, PureState, apply_conditional, branch_probability
from .network import BeamSplitter, ModeUnitary, NetworkSpec, compose, ns_canonical, su3_template
from .optimize import (
    ChainConfig,
    ConstrainedFamily,
    InfeasibleError,
    OptimizationProblem,
    OptimizationResult,
    OptimizerConfig,
    optimize_chain,
    optimize_correction,
    optimize_single,
    proportionality_residual,
    tradeoff_scan,
)
from .permanent import brute_force_element, matrix_element, permanent

__all__ = [
    "BACKEND",
    "COMPILED",
    "NS_TARGET",
    "BeamSplitter",
    "ChainConfig",
    "ConditionalMap",
    "ConstrainedFamily",
    "FailureStats",
    "FockState",
    "InfeasibleError",
    "ModeUnitary",
    "NetworkSpec",
    "OptimizationProblem",
    "OptimizationResult",
    "OptimizerConfig",
    "Outcome",
    "OutcomeRecord",
    "PureState",
    "apply_conditional",
    "branch_probability",
    "brute_force_element",
    "compose",
    "conditional_map",
    "enumerate_outcomes",
    "failure_stats",
    "ideal_recovery_bound",
    "matrix_element",
    "max_success_ceiling",
    "ns_canonical",
    "optimize_chain",
    "optimize_correction",
    "optimize_single",
    "permanent",
    "proportionality_residual",
    "su3_template",
    "tradeoff_scan",
]
