"""Error types shared across the toolkit.

Domain errors mean the request itself is invalid (bad parity, ordering,
out-of-range argument). Capacity errors mean the request is valid but
exceeds a configured resource budget. The CLI maps them to distinct
exit codes.
"""


class ChampionLabError(Exception):
    """Base class; carries the CLI exit code."""

    exit_code = 1


class DomainError(ChampionLabError):
    """Invalid argument for the requested operation."""

    exit_code = 2


class CapacityError(ChampionLabError):
    """Request exceeds a configured resource budget."""

    exit_code = 3


class ReportIOError(ChampionLabError):
    """Report or cache file could not be read or written."""

    exit_code = 4


class InternalCheckError(RuntimeError):
    """A redundant internal computation disagreed with its primary path."""
