"""Exception types shared across the package."""


class OnewaveError(Exception):
    """Base class for all package errors."""


class UnsupportedDerivativeOrder(OnewaveError):
    """Requested derivative order exceeds the configured maximum."""


class NonFinite(OnewaveError):
    """An evaluation produced inf or nan."""


class EmptyBox(OnewaveError):
    """A sampling box has no sample points."""


class InsufficientSweep(OnewaveError):
    """An epsilon sweep is too short or too narrow for a regression verdict."""


class BadEps(OnewaveError):
    """Regularization parameter outside (0, 1)."""


class GridMismatch(OnewaveError):
    """Grid functions defined on incompatible grids."""


class UnsupportedRoughKind(OnewaveError):
    """Rough coefficient kind not supported by the mollification machinery."""


class DimensionMismatch(OnewaveError):
    """Symbol and grid dimensions disagree."""


class TooLarge(OnewaveError):
    """Dense-matrix oracle requested beyond its size guard."""


class NoConvergence(OnewaveError):
    """Iterative estimator failed to converge (best estimate attached)."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class BoxTooSmall(OnewaveError):
    """Truncated integral tail estimate exceeds the requested tolerance."""


class UnstableStep(OnewaveError):
    """Time stepper norm growth exceeded the predicted bound."""


class IncompleteLedger(OnewaveError):
    """Energy ledger misses entries required by a check."""


class TagMismatch(OnewaveError):
    """Symbol lacks the structural tag required by a reduced-constant case."""


class InsufficientOrders(OnewaveError):
    """Sweep report does not cover the derivative orders a check needs."""


class ConfigInvalid(OnewaveError):
    """Scenario configuration failed schema validation."""
