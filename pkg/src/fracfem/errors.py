"""Exception types shared across the package."""

from __future__ import annotations


class FracFEMError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FracFEMError, ValueError):
    """An argument lies outside its admissible range."""


class QuadratureConvergenceError(FracFEMError, RuntimeError):
    """Node doubling did not reach the requested tolerance.

    Carries the last two composite estimates for inspection.
    """

    def __init__(self, message: str, estimates: tuple[float, float]):
        super().__init__(f"{message} (last estimates: {estimates[0]!r}, {estimates[1]!r})")
        self.estimates = estimates


class SidednessError(FracFEMError, ValueError):
    """A closed-form fractional operator met a term of the wrong sidedness."""


class RepresentabilityError(FracFEMError, ValueError):
    """The result would leave the truncated-power class (exponent <= -1 or a jump)."""


class EvaluabilityError(FracFEMError, ValueError):
    """A required endpoint value or derivative does not exist."""


class SingularEvaluationError(FracFEMError, ValueError):
    """Pointwise evaluation requested at the anchor of a negative-exponent term."""


class IntegrabilityError(FracFEMError, ValueError):
    """A product of terms is not integrable (colliding exponents sum to <= -1)."""


class NearSingularMatrixError(FracFEMError, RuntimeError):
    """LU elimination produced a pivot below the acceptance threshold."""


class RateUndefinedError(FracFEMError, ValueError):
    """A convergence rate was requested for a zero or negative error entry."""


class ConfigError(FracFEMError, ValueError):
    """A study configuration file or flag could not be parsed or validated."""
