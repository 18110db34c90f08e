"""Error types for the stoprule library.

Every error raised by the library derives from :class:`StopRuleError`. The
hierarchy is grouped by area (validation, numerics, oracle) so callers can
catch a whole area at once, and the CLI maps areas to exit codes.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from stoprule.oracle import ThresholdReport


class StopRuleError(Exception):
    """Root of all library errors."""


class ValidationError(StopRuleError):
    """A problem or strategy violates one of its invariants.

    Attributes:
        invariant: Short name of the violated invariant, printed by the CLI.
    """

    def __init__(self, message: str, invariant: str):
        super().__init__(message)
        self.invariant = invariant


class InvalidThreshold(ValidationError):
    """A cutoff r or s lies outside its feasible range."""


class InvalidCombination(ValidationError):
    """Variant, payoff regime and n do not fit together."""


class InvalidParameters(ValidationError):
    """Payoff or configuration parameters are out of range."""


class NumericError(StopRuleError):
    """A numerical routine could not produce a result."""


class DomainError(NumericError):
    """Argument outside the domain of a function."""


class ConvergenceError(NumericError):
    """A root bracket or an iteration failed to converge."""


class OracleError(StopRuleError):
    """Failures of the enumeration and dynamic-programming oracles."""


class SizeLimit(OracleError):
    """The instance is too large for the requested oracle."""

    def __init__(self, n: int, limit: int, what: str):
        super().__init__(f"{what} supports n <= {limit}, got n={n}")
        self.n = n
        self.limit = limit


class NotThreshold(OracleError):
    """An optimal policy is not of the expected threshold form.

    Attributes:
        report: The counterexample report listing contradicting states.
    """

    def __init__(self, message: str, report: Optional["ThresholdReport"] = None):
        super().__init__(message)
        self.report = report
