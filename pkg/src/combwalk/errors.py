"""Exception and warning types shared across the package."""


class CombWalkError(Exception):
    """Base class for all combwalk errors."""


class EmptyConfig(CombWalkError):
    """Lattice configuration contains no lines."""


class DuplicateLevel(CombWalkError):
    """Two configured lines share the same vertical coordinate."""


class InvalidProbability(CombWalkError):
    """A probability parameter lies outside its admissible open interval."""


class TooLargeForExact(CombWalkError):
    """Step count exceeds the exact dynamic-programming limit."""


class InvalidPath(CombWalkError):
    """A walk path violates the unit-increment / start-at-zero contract."""


class EmptyTable(CombWalkError):
    """A local-time table with no visits where at least one is required."""


class ShapeMismatch(CombWalkError):
    """Vector lengths or distribution supports do not line up."""


class InvalidScale(CombWalkError):
    """A scale parameter that must be positive is not."""


class NotComparable(CombWalkError):
    """Two configurations cannot be compared under the requested test."""


class InsufficientGrid(CombWalkError):
    """A grid of step counts is too small or too narrow for a slope fit."""


class RangeWarning(UserWarning):
    """A tail bound was evaluated outside its advertised validity range.

    The value is still computed; callers that care should treat the
    flagged points as extrapolation.
    """
