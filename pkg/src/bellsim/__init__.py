"""Exact simulation of CHSH Bell-test circuits on small qubit registers."""

from .circuits import (
    OBSERVABLES,
    VARIANTS,
    CircuitSpec,
    build,
    exact_distribution,
    final_state,
    theoretical_expectations,
)
from .estimator import ExperimentResult, NoiseConfig, run_experiment

__version__ = "0.1.0"

__all__ = [
    "OBSERVABLES",
    "VARIANTS",
    "CircuitSpec",
    "ExperimentResult",
    "NoiseConfig",
    "build",
    "exact_distribution",
    "final_state",
    "run_experiment",
    "theoretical_expectations",
]
