"""Exception hierarchy shared across the library."""


class TrajThermoError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(TrajThermoError, ValueError):
    """Phase-space input does not match the model dimension."""


class UnsupportedSchemeError(TrajThermoError, ValueError):
    """Requested integration scheme cannot be applied to this model."""


class UnsupportedModelError(TrajThermoError, ValueError):
    """Model lacks the structure an operation needs (e.g. no kinetic/potential split)."""


class CapacityError(TrajThermoError, ValueError):
    """Enumerable path space exceeds the configured size limit."""


class DomainError(TrajThermoError, ValueError):
    """Parameter outside the mathematical domain of an operation."""


class InfeasibleConstraintError(TrajThermoError, ValueError):
    """Constraint target not attainable for any positive multiplier."""


class NonConvergenceError(TrajThermoError, RuntimeError):
    """Iteration budget exhausted; carries the last iterate in ``last_path``."""

    def __init__(self, message, last_path=None):
        super().__init__(message)
        self.last_path = last_path


class CausticError(TrajThermoError, ValueError):
    """Closed-form propagator evaluated at a singular (caustic) time."""


class ValidationError(TrajThermoError, ValueError):
    """Invalid experiment configuration; message names the offending parameter."""
