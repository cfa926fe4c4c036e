"""Exception types shared across the package.

The CLI maps these onto distinct exit codes, so library code should raise
the most specific class that applies rather than a bare Exception.
"""

from __future__ import annotations


class PlaplabError(Exception):
    """Base class for all package-specific failures."""


class GridMismatchError(PlaplabError):
    """Two states (or a state and a field) live on incompatible lattices."""


class ConfigError(PlaplabError):
    """A run configuration could not be parsed or refers to unknown keys.

    ``field`` holds the dotted section.key path when one is known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class InvariantError(PlaplabError):
    """A validated quantity violates a documented precondition.

    Raised for semantic problems (p out of range, eps outside [0, eps0],
    unstable step size) as opposed to syntactic parse failures.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class InnerSolverError(PlaplabError):
    """The proximal inner solve stopped without meeting its residual target."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class InfeasibleYoungError(PlaplabError):
    """No Young parameter on the scanned grid keeps the decay rate positive.

    Carries the scanned grid and the corresponding rate values so the
    failure can be reported with its evidence.
    """

    def __init__(self, message: str, young_grid, rate_values):
        super().__init__(message)
        self.young_grid = young_grid
        self.rate_values = rate_values
