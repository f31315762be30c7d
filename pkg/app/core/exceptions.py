"""Error hierarchy for the workbench"""

from typing import List, Optional


class WorkbenchError(Exception):
    """Base class for all workbench failures."""


class AlgebraError(WorkbenchError, ArithmeticError):
    """Zero denominators, singular matrices, degree cap overflow."""


class DomainError(WorkbenchError, ValueError):
    """An argument lies outside the domain of an operation."""


class DimensionError(DomainError):
    """Matrix or Schwartz-function shapes do not match."""


class UnsupportedFieldError(WorkbenchError):
    """The operation is not defined for this base field or character."""


class CapabilityError(WorkbenchError):
    """The exact path cannot evaluate this; use the numeric path instead."""


class PoleError(AlgebraError):
    """Numeric evaluation too close to a pole."""

    def __init__(self, message: str, root: Optional[complex] = None):
        super().__init__(message)
        self.root = root


class PoleCollisionError(AlgebraError):
    """A formal shell sum has a pole exactly where it is summed.

    Raised for degenerate parameters; resampling the parameters avoids it.
    """


class DivergenceError(WorkbenchError):
    """A real integral does not converge at the requested s."""


class DivergenceWarning(UserWarning):
    """Truncated shell sums that fail to decay."""

    def __init__(self, message: str, profile: Optional[List[float]] = None):
        super().__init__(message)
        self.profile = list(profile or [])
