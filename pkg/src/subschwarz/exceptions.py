"""Exception hierarchy shared across the package."""


class SubschwarzError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(SubschwarzError):
    """Inconsistent problem, grid, or decomposition setup."""


class ValidationError(ConfigurationError):
    """A user-supplied value is out of its admissible range."""


class DivergenceError(SubschwarzError):
    """An iteration grew instead of contracting.

    The partial :class:`~subschwarz.core.IterationHistory` is attached as
    ``history`` so callers can still report what happened.
    """

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history


class SizeCapError(SubschwarzError):
    """A dense assembly or eigensolve would exceed its configured size cap."""


class DegenerateCoarseSpaceError(SubschwarzError):
    """Randomized sketch does not contain enough independent directions."""


class CoarseOperatorRankError(SubschwarzError):
    """The projected coarse matrix is (numerically) rank deficient."""
