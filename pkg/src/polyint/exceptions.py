"""Exception hierarchy shared by every module."""


class PolyIntError(Exception):
    """Base class for all package errors."""


class InputError(PolyIntError, ValueError):
    """Invalid argument: non-unit direction, bad frame, too few nodes, etc."""


class ConstructionError(PolyIntError, ValueError):
    """Body or profile parameters do not describe a valid bounded body."""


class DomainError(PolyIntError, ValueError):
    """Formula evaluated where it is singular (e.g. an expansion in 1/r at r=0)."""


class DegenerateInputError(PolyIntError, ValueError):
    """Data is valid but degenerate for the requested diagnostic."""


class HypothesisError(PolyIntError, ValueError):
    """A theorem's hypothesis fails, so the computation is rejected."""


class RecoveryError(PolyIntError):
    """Ellipsoid recovery rejected the input (verdict failure, not a bug)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class AccuracyWarning(UserWarning):
    """Result is computed but may not meet its nominal accuracy."""
