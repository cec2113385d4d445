"""Exception types shared across the simulator."""


class FormationSimError(Exception):
    """Base class for all simulator errors."""


class ConfigError(FormationSimError):
    """Scenario configuration is malformed or fails validation.

    Carries the offending key path when known.
    """

    def __init__(self, message, key=None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class GraphError(FormationSimError):
    """Invalid communication topology or violated spectral precondition."""


class EnvelopeError(FormationSimError):
    """Vehicle state left the supported flight envelope (e.g. V_T <= 0)."""


class SingularityError(FormationSimError):
    """Control conversion evaluated too close to the vertical-flight singularity."""


class SimulationError(FormationSimError):
    """Simulation aborted; message carries time/vehicle context."""
