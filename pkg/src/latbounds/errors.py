"""Exception and warning types shared across the package."""


class LatboundsError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(LatboundsError):
    """Operands have incompatible shapes or dimensions."""


class SingularMatrix(LatboundsError):
    """Generator matrix is singular or numerically rank-deficient."""


class UnsupportedDimension(LatboundsError):
    """No built-in construction exists for the requested dimension."""


class NotOrthogonal(LatboundsError):
    """A user-supplied rotation matrix fails the orthogonality check."""


class DegenerateConstellation(LatboundsError):
    """Operation needs at least two constellation points."""


class TooLarge(LatboundsError):
    """Requested enumeration or summation exceeds the configured cap."""


class InvalidShape(LatboundsError):
    """Nakagami shape parameter below the physical minimum of 0.5."""


class DomainError(LatboundsError):
    """Argument outside the mathematical domain of a special function."""


class ContourFailure(LatboundsError):
    """Mellin-Barnes contour truncation error exceeds the safe threshold."""


class ParameterUnsupported(LatboundsError):
    """Closed-form evaluation was requested for parameters it does not cover."""


class EmptyCandidates(LatboundsError):
    """Decoder called with an empty candidate list."""


class ConfigError(LatboundsError):
    """Invalid sweep configuration; carries the offending field name."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class WindowSuspect(UserWarning):
    """Too many simulated error events were decided at the decode-window
    boundary, so the infinite-lattice FEP estimate may be biased low."""
