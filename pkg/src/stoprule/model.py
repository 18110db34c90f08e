"""Domain types shared by every module.

All types are frozen dataclasses or enums, so they can be shared freely
between threads and processes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Any, Dict, Optional, Tuple, Union

from stoprule.error import InvalidCombination, InvalidParameters, InvalidThreshold

Number = Union[int, float, Fraction]


def to_fraction(value: Number) -> Fraction:
    """Exact rational for ``value``; floats keep the decimal they print as."""
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value))


class Variant(Enum):
    CLASSIC = "classic"
    BEST_OR_WORST = "bw"
    POSTDOC = "postdoc"


class PayoffKind(Enum):
    BINARY = "binary"
    COST = "cost"
    PERQUISITE = "perq"
    UNBALANCED = "unbalanced"


class Method(Enum):
    """Provenance of an expected-payoff value."""

    CLOSED_FORM = "closed-form"
    SUMMATION = "summation"
    DP = "dp"
    ENUMERATION = "enumeration"
    MONTE_CARLO = "monte-carlo"


class StrategyKind(Enum):
    ONE_THRESHOLD = "one"
    TWO_THRESHOLD = "two"


@dataclass(frozen=True)
class PayoffRegime:
    """How a successful selection at interview k is paid.

    ``m`` and ``M`` are only meaningful for the unbalanced regime, where the
    worst candidate pays ``m`` and the best pays ``M``.
    """

    kind: PayoffKind
    m: Optional[Fraction] = None
    M: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.m is not None:
            object.__setattr__(self, "m", to_fraction(self.m))
        if self.M is not None:
            object.__setattr__(self, "M", to_fraction(self.M))

    @classmethod
    def binary(cls) -> "PayoffRegime":
        return cls(PayoffKind.BINARY)

    @classmethod
    def cost(cls) -> "PayoffRegime":
        return cls(PayoffKind.COST)

    @classmethod
    def perquisite(cls) -> "PayoffRegime":
        return cls(PayoffKind.PERQUISITE)

    @classmethod
    def unbalanced(cls, m: Number, M: Number) -> "PayoffRegime":
        return cls(PayoffKind.UNBALANCED, m, M)

    def multiplier(self, k: int, n: int) -> Fraction:
        """Factor applied to a success at interview ``k``."""
        if self.kind is PayoffKind.COST:
            return 1 - Fraction(k, n)
        if self.kind is PayoffKind.PERQUISITE:
            return 1 + Fraction(k, n)
        return Fraction(1)

    def __str__(self) -> str:
        if self.kind is PayoffKind.UNBALANCED:
            return f"unbalanced(m={self.m},M={self.M})"
        return self.kind.value


@dataclass(frozen=True)
class ProblemSpec:
    variant: Variant
    payoff: PayoffRegime
    n: int

    @property
    def two_threshold(self) -> bool:
        """Whether the optimal rule family for this problem has two cutoffs."""
        return self.payoff.kind is PayoffKind.UNBALANCED or (
            self.variant is Variant.POSTDOC and self.payoff.kind is PayoffKind.COST
        )

    def target_weights(self) -> Dict[int, Fraction]:
        """Payout per overall rank (1 = best) of the selected candidate."""
        n = self.n
        if self.variant is Variant.CLASSIC:
            return {1: Fraction(1)}
        if self.variant is Variant.POSTDOC:
            return {2: Fraction(1)}
        if self.payoff.kind is PayoffKind.UNBALANCED:
            return {1: self.payoff.M, n: self.payoff.m}
        if n == 1:
            return {1: Fraction(1)}
        return {1: Fraction(1), n: Fraction(1)}

    def payoff_bound(self) -> Fraction:
        if self.payoff.kind is PayoffKind.UNBALANCED:
            return self.payoff.M
        return Fraction(2)

    def __str__(self) -> str:
        return f"{self.variant.value}/{self.payoff} n={self.n}"


_STRATEGY_RE = re.compile(r"^\s*r\s*=\s*(\d+)\s*(?:,\s*s\s*=\s*(\d+)\s*)?$")


@dataclass(frozen=True)
class Strategy:
    """Cutoff rule: reject ``r`` candidates, then accept by class.

    A two-threshold rule accepts only relatively best candidates on
    interviews ``r+1..s`` and the wider eligible class from ``s+1`` on.
    """

    kind: StrategyKind
    r: int
    s: Optional[int] = None

    @classmethod
    def one(cls, r: int) -> "Strategy":
        return cls(StrategyKind.ONE_THRESHOLD, r)

    @classmethod
    def two(cls, r: int, s: int) -> "Strategy":
        return cls(StrategyKind.TWO_THRESHOLD, r, s)

    @classmethod
    def parse(cls, text: str) -> "Strategy":
        """Parse the canonical form ``r=<int>`` or ``r=<int>,s=<int>``."""
        match = _STRATEGY_RE.match(text)
        if not match:
            raise ValueError(f"not a strategy: {text!r} (expected 'r=<int>' or 'r=<int>,s=<int>')")
        r = int(match.group(1))
        if match.group(2) is None:
            return cls.one(r)
        return cls.two(r, int(match.group(2)))

    @property
    def thresholds(self) -> Tuple[int, ...]:
        return (self.r,) if self.s is None else (self.r, self.s)

    def __str__(self) -> str:
        if self.kind is StrategyKind.ONE_THRESHOLD:
            return f"r={self.r}"
        return f"r={self.r},s={self.s}"

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"kind": self.kind.value, "r": self.r}
        if self.s is not None:
            data["s"] = self.s
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Strategy":
        return cls(StrategyKind(data["kind"]), int(data["r"]), data.get("s"))


@dataclass(frozen=True)
class EvalResult:
    """Expected payoff of one strategy, with provenance."""

    value: float
    exact: Optional[Fraction]
    method: Method

    @classmethod
    def from_exact(cls, exact: Fraction, method: Method) -> "EvalResult":
        return cls(float(exact), exact, method)

    @classmethod
    def from_float(cls, value: float, method: Method) -> "EvalResult":
        return cls(float(value), None, method)

    @property
    def exact_num(self) -> Optional[int]:
        return None if self.exact is None else self.exact.numerator

    @property
    def exact_den(self) -> Optional[int]:
        return None if self.exact is None else self.exact.denominator

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "exact": None if self.exact is None else f"{self.exact.numerator}/{self.exact.denominator}",
            "method": self.method.value,
        }


def validate_spec(spec: ProblemSpec) -> None:
    """Check the problem-level invariants.

    Raises:
        InvalidParameters: n < 1, or unbalanced payments outside 0 <= m <= M, M > 0.
        InvalidCombination: the variant, payoff and n do not fit together.
    """
    if not isinstance(spec.n, int) or isinstance(spec.n, bool) or spec.n < 1:
        raise InvalidParameters(f"n must be a positive integer, got {spec.n!r}", invariant="n >= 1")
    payoff = spec.payoff
    if payoff.kind is PayoffKind.UNBALANCED:
        if spec.variant is not Variant.BEST_OR_WORST:
            raise InvalidCombination(
                f"unbalanced payoff requires the Best-or-Worst variant, got {spec.variant.value}",
                invariant="unbalanced => variant = bw",
            )
        if spec.n < 2:
            raise InvalidCombination(
                "unbalanced payoff needs n >= 2 so that best and worst differ",
                invariant="unbalanced => n >= 2",
            )
        if payoff.m is None or payoff.M is None:
            raise InvalidParameters("unbalanced payoff needs both m and M", invariant="m, M given")
        if payoff.m < 0 or payoff.M <= 0:
            raise InvalidParameters(
                f"unbalanced payoff needs m >= 0 and M > 0, got m={payoff.m}, M={payoff.M}",
                invariant="m >= 0, M > 0",
            )
        if payoff.m > payoff.M:
            raise InvalidParameters(
                f"unbalanced payoff needs m <= M, got m={payoff.m}, M={payoff.M}",
                invariant="m <= M",
            )
    elif payoff.m is not None or payoff.M is not None:
        raise InvalidParameters(
            f"{payoff.kind.value} payoff takes no m/M parameters",
            invariant="m, M only with unbalanced",
        )
    if spec.variant is Variant.POSTDOC and spec.n < 2:
        raise InvalidCombination(
            "postdoc variant needs n >= 2 (a second-best candidate must exist)",
            invariant="postdoc => n >= 2",
        )


def validate(spec: ProblemSpec, strat: Strategy) -> None:
    """Check that ``strat`` is a feasible strategy for ``spec``.

    Raises:
        InvalidParameters, InvalidCombination: see :func:`validate_spec`.
        InvalidCombination: the strategy has the wrong number of thresholds.
        InvalidThreshold: r or s out of range.
    """
    validate_spec(spec)
    n = spec.n
    wants_two = spec.two_threshold
    if wants_two and strat.kind is not StrategyKind.TWO_THRESHOLD:
        raise InvalidCombination(
            f"{spec.variant.value}/{spec.payoff.kind.value} uses two-threshold strategies",
            invariant="two-threshold problem => r,s",
        )
    if not wants_two and strat.kind is not StrategyKind.ONE_THRESHOLD:
        raise InvalidCombination(
            f"{spec.variant.value}/{spec.payoff.kind.value} uses one-threshold strategies",
            invariant="one-threshold problem => r",
        )
    if not 0 <= strat.r <= n - 1:
        raise InvalidThreshold(f"r must lie in [0, {n - 1}], got r={strat.r}", invariant="0 <= r <= n-1")
    if strat.kind is StrategyKind.TWO_THRESHOLD:
        if strat.s is None or not strat.r <= strat.s <= n - 1:
            raise InvalidThreshold(
                f"s must lie in [{strat.r}, {n - 1}], got s={strat.s}",
                invariant="r <= s <= n-1",
            )
    elif strat.s is not None:
        raise InvalidThreshold("one-threshold strategy carries no s", invariant="one-threshold => no s")
