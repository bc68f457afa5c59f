"""Exception types shared across the package."""

import numpy as np


class LienardError(Exception):
    """Base class for all errors raised by this package."""


class EvaluationDomainError(LienardError, ValueError):
    """A vector field produced a non-finite value."""

    def __init__(self, message, state=None, t=None):
        super().__init__(message)
        self.state = None if state is None else np.array(state, dtype=float)
        self.t = t


class DivergenceError(LienardError):
    """The integrated state left the admissible ball (blow-up)."""

    def __init__(self, message, t_last, state_last):
        super().__init__(message)
        self.t_last = t_last
        self.state_last = np.array(state_last, dtype=float)


class NoReturnError(LienardError):
    """A trajectory failed to recross the Poincare section before the horizon."""


class ConvergenceError(LienardError):
    """An iterative solver exhausted its iteration budget."""


class ConfigError(LienardError, ValueError):
    """Invalid run configuration."""
