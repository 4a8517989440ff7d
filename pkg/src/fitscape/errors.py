"""Shared exception types.

ValidationError covers malformed inputs (bad files, undeclared levels,
out-of-range ids); PreconditionError covers operations invoked on data
that cannot support them (e.g. exhaustive scans on incomplete landscapes).
The CLI maps them to exit codes 2 and 3 respectively.
"""


class FitscapeError(Exception):
    """Base class for all fitscape errors."""


class ValidationError(FitscapeError):
    """Input data or parameters failed validation."""


class PreconditionError(FitscapeError):
    """An operation's precondition is not met by the given landscape."""
