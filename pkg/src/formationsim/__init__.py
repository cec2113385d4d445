"""Deterministic multi-vehicle close-formation flight simulator.

Rigid virtual-structure references, graph-coupled cooperative filtering,
robust per-vehicle tracking control with disturbance estimation, and a
fixed-step integration of the whole coupled system.
"""

from .errors import (
    ConfigError,
    EnvelopeError,
    FormationSimError,
    GraphError,
    SimulationError,
    SingularityError,
)
from .sim import Scenario, SimLog, metrics, run

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "EnvelopeError",
    "FormationSimError",
    "GraphError",
    "Scenario",
    "SimLog",
    "SimulationError",
    "SingularityError",
    "metrics",
    "run",
    "__version__",
]
