"""Exception types shared across the package."""

from __future__ import annotations


class K3FixError(Exception):
    """Base class for every error raised by this package."""


class UsageError(K3FixError, ValueError):
    """Bad arguments: mismatched conductors, unknown lattice names, malformed input."""


class SingularTermError(K3FixError, ZeroDivisionError):
    """A fixed-point term has a zero eigenvalue exponent, so the point lies on a curve."""


class InfeasibleError(K3FixError):
    """A rank scenario admits no solution."""


class UnboundedError(K3FixError):
    """An enumeration was requested over a domain with no finite bound."""


class ScenarioError(UsageError):
    """A scenario document failed validation.

    ``field`` is a dotted path to the offending entry (``capacities[1].types[0]``).
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class InconsistencyError(K3FixError):
    """An internal invariant failed; the result must not be trusted."""
