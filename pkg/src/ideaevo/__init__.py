"""Collective decision making as evolution of a population of ideas."""

from .evolution import OperatorKind, OperatorParams, Population
from .landscape import UtilityLandscape, apply_bias, eval_utility, generate_true_landscape
from .metrics import OutcomeMetrics, convergence, entropy, most_supported
from .simulation import SimulationConfig, preset_profiles, run

__all__ = [
    "OperatorKind", "OperatorParams", "Population", "UtilityLandscape", "apply_bias",
    "eval_utility", "generate_true_landscape", "OutcomeMetrics", "convergence",
    "entropy", "most_supported", "SimulationConfig", "preset_profiles", "run",
]
__version__ = "0.1.0"
