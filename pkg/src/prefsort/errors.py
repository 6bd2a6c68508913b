"""Exception hierarchy shared across the package."""


class PrefsortError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PrefsortError, ValueError):
    """Malformed user input: bad matrix, bad config, unknown id, ..."""


class DegenerateModelError(PrefsortError):
    """Model cannot be normalized (every criterion is flat)."""


class SolverFailure(PrefsortError):
    """The LP solver could not certify a correct answer."""


class StateConflictError(PrefsortError):
    """Operation not valid in the current session state."""


class InternalError(PrefsortError):
    """A should-never-happen condition, reported with diagnostics."""
