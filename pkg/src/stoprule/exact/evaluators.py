"""Expected payoffs of cutoff rules at finite n.

One-threshold rules reject the first r candidates and accept the first
eligible one: relatively best (Classic), relatively best or worst
(Best-or-Worst), relatively second best (Postdoc). Two-threshold rules
accept only relatively best candidates on interviews r+1..s and the wider
class from s+1 on.

Sums are exact ``Fraction`` arithmetic while n <= ``Config.exact_limit`` and
``math.fsum`` floats above it. Closed forms are always exact.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from itertools import accumulate
from operator import truediv
from typing import Callable, Iterable, List, Union

import numpy as np

from stoprule.asymptotics import harmonic
from stoprule.config import Config, resolve
from stoprule.error import InvalidCombination, InvalidParameters, InvalidThreshold
from stoprule.model import (
    EvalResult,
    Method,
    Number,
    PayoffKind,
    PayoffRegime,
    ProblemSpec,
    Strategy,
    Variant,
    validate,
)

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]


def _ratio(exact: bool) -> Callable[[int, int], Scalar]:
    if exact:
        return Fraction
    return truediv


def _total(terms: Iterable[Scalar], exact: bool) -> Scalar:
    if exact:
        return sum(terms, Fraction(0))
    return math.fsum(terms)


def _finish(value: Scalar, exact: bool, method: Method) -> EvalResult:
    if exact:
        return EvalResult.from_exact(value, method)
    return EvalResult.from_float(value, method)


def _gain(kind: PayoffKind, n: int, k: int) -> int:
    """Payoff multiplier at interview k, times n."""
    if kind is PayoffKind.COST:
        return n - k
    if kind is PayoffKind.PERQUISITE:
        return n + k
    return n


# -- one-threshold rules -------------------------------------------------------


def _one_threshold(variant: Variant, kind: PayoffKind, n: int, r: int, exact: bool) -> Scalar:
    q = _ratio(exact)
    if variant is Variant.CLASSIC:
        if r == 0:
            return q(_gain(kind, n, 1), n * n)
        terms = (q(_gain(kind, n, k), k - 1) for k in range(r + 1, n + 1))
        return q(r, n * n) * _total(terms, exact)
    if variant is Variant.BEST_OR_WORST:
        if n == 1:
            return q(_gain(kind, 1, 1), 1)
        # The first two candidates are always nice.
        if r < 2:
            return q(2 * _gain(kind, n, r + 1), n * n)
        terms = (q(_gain(kind, n, k), (k - 1) * (k - 2)) for k in range(r + 1, n + 1))
        return q(2 * r * (r - 1), n * n) * _total(terms, exact)
    # The first candidate is never relatively second best.
    r = max(r, 1)
    terms = (q(_gain(kind, n, k), 1) for k in range(r + 1, n + 1))
    return q(r, n * n * (n - 1)) * _total(terms, exact)


def _one_point(variant: Variant, payoff: PayoffRegime, n: int, r: int, config: Config | None) -> EvalResult:
    validate(ProblemSpec(variant, payoff, n), Strategy.one(r))
    exact = n <= resolve(config).exact_limit
    return _finish(_one_threshold(variant, payoff.kind, n, r, exact), exact, Method.SUMMATION)


def classic_binary(n: int, r: int, config: Config | None = None) -> EvalResult:
    """Probability of hiring the best: (r/n) * sum_{k=r+1}^{n} 1/(k-1).

    r = 0 accepts the first candidate and succeeds with probability 1/n.

    Raises:
        InvalidThreshold: r outside [0, n-1].
    """
    return _one_point(Variant.CLASSIC, PayoffRegime.binary(), n, r, config)


def classic_cost(n: int, r: int, config: Config | None = None) -> EvalResult:
    """(r/n) * sum_{k=r+1}^{n} (1 - k/n)/(k-1)."""
    return _one_point(Variant.CLASSIC, PayoffRegime.cost(), n, r, config)


def classic_perquisite(n: int, r: int, config: Config | None = None) -> EvalResult:
    """(r/n) * sum_{k=r+1}^{n} (1 + k/n)/(k-1)."""
    return _one_point(Variant.CLASSIC, PayoffRegime.perquisite(), n, r, config)


def gilbert_mosteller_cutoff(n: int) -> int:
    """floor((n - 1/2)/e + 1/2), the refined approximation of the classic cutoff."""
    if n < 2:
        raise InvalidParameters(f"cutoff approximation needs n >= 2, got {n}", invariant="n >= 2")
    return math.floor((n - 0.5) / math.e + 0.5)


def classic_cutoff_floor(n: int) -> int:
    """floor(n/e)."""
    if n < 1:
        raise InvalidParameters(f"n must be positive, got {n}", invariant="n >= 1")
    return math.floor(n / math.e)


def bw_binary(n: int, r: int) -> EvalResult:
    """2r(n-r)/(n(n-1)); 2/n for r in {0, 1}; 1 when n <= 2."""
    validate(ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.binary(), n), Strategy.one(r))
    if n <= 2:
        value = Fraction(1)
    elif r < 2:
        value = Fraction(2, n)
    else:
        value = Fraction(2 * r * (n - r), n * (n - 1))
    return EvalResult.from_exact(value, Method.CLOSED_FORM)


def bw_cost(n: int, r: int, config: Config | None = None) -> EvalResult:
    """(2r(r-1)/n^2) * sum_{k=r+1}^{n} (n-k)/((k-1)(k-2))."""
    return _one_point(Variant.BEST_OR_WORST, PayoffRegime.cost(), n, r, config)


def bw_perquisite(n: int, r: int, config: Config | None = None) -> EvalResult:
    """(2r(r-1)/n^2) * sum_{k=r+1}^{n} (n+k)/((k-1)(k-2))."""
    return _one_point(Variant.BEST_OR_WORST, PayoffRegime.perquisite(), n, r, config)


def _telescoped_range(n: int, r: int) -> None:
    if not 2 <= r <= n - 1:
        raise InvalidThreshold(
            f"telescoped form needs 2 <= r <= n-1, got n={n}, r={r}",
            invariant="2 <= r <= n-1",
        )


def bw_cost_telescoped(n: int, r: int) -> EvalResult:
    """Best-or-Worst cost payoff written with harmonic numbers (r >= 2)."""
    _telescoped_range(n, r)
    tail = harmonic(n - 1) - harmonic(r - 1)
    value = Fraction(2 * r * (r - 1), n * n) * (
        Fraction(n - 2, r - 1) - Fraction(n - 2, n - 1) - tail
    )
    return EvalResult.from_exact(value, Method.CLOSED_FORM)


def bw_perquisite_telescoped(n: int, r: int) -> EvalResult:
    """Best-or-Worst perquisite payoff written with harmonic numbers (r >= 2).

    The harmonic tail enters with a plus sign: (n+k) = (n+2) + (k-2).
    """
    _telescoped_range(n, r)
    tail = harmonic(n - 1) - harmonic(r - 1)
    value = Fraction(2 * r * (r - 1), n * n) * (
        Fraction(n + 2, r - 1) - Fraction(n + 2, n - 1) + tail
    )
    return EvalResult.from_exact(value, Method.CLOSED_FORM)


def pd_binary(n: int, r: int) -> EvalResult:
    """Probability of hiring the second best: r(n-r)/(n(n-1)). r = 0 acts as r = 1."""
    validate(ProblemSpec(Variant.POSTDOC, PayoffRegime.binary(), n), Strategy.one(r))
    r = max(r, 1)
    return EvalResult.from_exact(Fraction(r * (n - r), n * (n - 1)), Method.CLOSED_FORM)


def pd_perquisite(n: int, r: int) -> EvalResult:
    """r(n-r)(3n+1+r)/(2n^2(n-1)). r = 0 acts as r = 1."""
    validate(ProblemSpec(Variant.POSTDOC, PayoffRegime.perquisite(), n), Strategy.one(r))
    r = max(r, 1)
    return EvalResult.from_exact(
        Fraction(r * (n - r) * (3 * n + 1 + r), 2 * n * n * (n - 1)), Method.CLOSED_FORM
    )


def pd_perquisite_cutoff_exact(n: int) -> float:
    """Real maximiser (-1 - 2n + sqrt(1 + 7n + 13n^2))/3 of the Postdoc perquisite payoff."""
    if n < 2:
        raise InvalidParameters(f"postdoc needs n >= 2, got {n}", invariant="n >= 2")
    return (-1.0 - 2.0 * n + math.sqrt(1.0 + 7.0 * n + 13.0 * n * n)) / 3.0


def pd_perquisite_cutoff(n: int) -> int:
    """The real maximiser rounded to the nearest feasible integer cutoff."""
    return min(max(math.floor(pd_perquisite_cutoff_exact(n) + 0.5), 1), n - 1)


# -- two-threshold rules -------------------------------------------------------


def _survive_wide(r: int, s: int, k: int, q: Callable[[int, int], Scalar]) -> Scalar:
    """P(nothing accepted before interview k), for k > s and r >= 1."""
    if k == r + 1:
        return q(1, 1)
    if k == s + 1:
        return q(r, s)
    return q(r * (s - 1), (k - 1) * (k - 2))


def _unbalanced(n: int, r: int, s: int, m: Fraction, M: Fraction, exact: bool) -> Scalar:
    q = _ratio(exact)
    low, high = (m, M) if exact else (float(m), float(M))
    if r == 0:
        return (high + low) * q(1, n)
    early = (q(r, k - 1) * high * q(1, n) for k in range(r + 1, s + 1))
    late = (_survive_wide(r, s, k, q) * (high + low) * q(1, n) for k in range(s + 1, n + 1))
    return _total(early, exact) + _total(late, exact)


def _postdoc_cost(n: int, r: int, s: int, exact: bool) -> Scalar:
    q = _ratio(exact)
    if r == 0:
        return q(n - 1, n * n)
    early = (q(r * (n - k) * (n - k), (k - 1) * n * n * (n - 1)) for k in range(r + 1, s + 1))
    late = (_survive_wide(r, s, k, q) * q(n - k, n * n) for k in range(s + 1, n + 1))
    return _total(early, exact) + _total(late, exact)


def bw_unbalanced(
    n: int, r: int, s: int, m: Number, M: Number, config: Config | None = None
) -> EvalResult:
    """Best-or-Worst payoff paying M for the best and m for the worst.

    Raises:
        InvalidThreshold: not 0 <= r <= s <= n-1.
        InvalidParameters: m > M, m < 0 or M <= 0.
    """
    payoff = PayoffRegime.unbalanced(m, M)
    validate(ProblemSpec(Variant.BEST_OR_WORST, payoff, n), Strategy.two(r, s))
    exact = n <= resolve(config).exact_limit
    value = _unbalanced(n, r, s, payoff.m, payoff.M, exact)
    return _finish(value, exact, Method.SUMMATION)


def pd_cost(n: int, r: int, s: int, config: Config | None = None) -> EvalResult:
    """Postdoc payoff with interview cost under a two-threshold rule.

    Interviews r+1..s accept relative rank 1, interviews after s accept
    relative rank 1 or 2.
    """
    validate(ProblemSpec(Variant.POSTDOC, PayoffRegime.cost(), n), Strategy.two(r, s))
    exact = n <= resolve(config).exact_limit
    return _finish(_postdoc_cost(n, r, s, exact), exact, Method.SUMMATION)


# -- dispatch ------------------------------------------------------------------


def evaluate(spec: ProblemSpec, strat: Strategy, config: Config | None = None) -> EvalResult:
    """Expected payoff of ``strat`` on ``spec`` by the matching evaluator."""
    validate(spec, strat)
    n, r, kind = spec.n, strat.r, spec.payoff.kind
    if kind is PayoffKind.UNBALANCED:
        return bw_unbalanced(n, r, strat.s, spec.payoff.m, spec.payoff.M, config)
    if spec.variant is Variant.POSTDOC:
        if kind is PayoffKind.COST:
            return pd_cost(n, r, strat.s, config)
        if kind is PayoffKind.BINARY:
            return pd_binary(n, r)
        return pd_perquisite(n, r)
    if spec.variant is Variant.BEST_OR_WORST and kind is PayoffKind.BINARY:
        return bw_binary(n, r)
    return _one_point(spec.variant, spec.payoff, n, r, config)


def point_value(spec: ProblemSpec, strat: Strategy, exact: bool) -> Scalar:
    """Unvalidated payoff as a Fraction (``exact``) or float; for scans and oracles."""
    n, r = spec.n, strat.r
    if spec.payoff.kind is PayoffKind.UNBALANCED:
        return _unbalanced(n, r, strat.s, spec.payoff.m, spec.payoff.M, exact)
    if spec.variant is Variant.POSTDOC and spec.payoff.kind is PayoffKind.COST:
        return _postdoc_cost(n, r, strat.s, exact)
    return _one_threshold(spec.variant, spec.payoff.kind, n, r, exact)


# -- whole profiles ------------------------------------------------------------


def _require_one(spec: ProblemSpec) -> None:
    if spec.two_threshold:
        raise InvalidCombination(
            f"{spec.variant.value}/{spec.payoff.kind.value} uses two-threshold strategies",
            invariant="one-threshold problem => r",
        )


def one_threshold_profile_exact(spec: ProblemSpec) -> List[Fraction]:
    """Exact payoffs of every one-threshold rule, indexed by r = 0..n-1."""
    _require_one(spec)
    n, kind, variant = spec.n, spec.payoff.kind, spec.variant
    if variant is Variant.CLASSIC:
        lo = 1
        terms = [Fraction(_gain(kind, n, k), k - 1) for k in range(n, lo, -1)]
        scales = [Fraction(r, n * n) for r in range(lo, n)]
    elif variant is Variant.BEST_OR_WORST:
        lo = 2
        terms = [Fraction(_gain(kind, n, k), (k - 1) * (k - 2)) for k in range(n, lo, -1)]
        scales = [Fraction(2 * r * (r - 1), n * n) for r in range(lo, n)]
    else:
        lo = 1
        terms = [Fraction(_gain(kind, n, k)) for k in range(n, lo, -1)]
        scales = [Fraction(r, n * n * (n - 1)) for r in range(lo, n)]
    # tail[i] = sum of the terms for k > lo + i
    tail = list(accumulate(terms, initial=Fraction(0)))[::-1]
    values = [_one_threshold(variant, kind, n, r, True) for r in range(min(lo, n))]
    values.extend(scale * tail[i] for i, scale in enumerate(scales))
    return values


def one_threshold_profile(spec: ProblemSpec) -> np.ndarray:
    """Float payoffs of every one-threshold rule, indexed by r = 0..n-1.

    Uses numpy suffix sums, so the whole profile costs O(n).
    """
    _require_one(spec)
    n, kind, variant = spec.n, spec.payoff.kind, spec.variant
    k = np.arange(1, n + 1, dtype=float)
    r = np.arange(n, dtype=float)
    if kind is PayoffKind.COST:
        gain = n - k
    elif kind is PayoffKind.PERQUISITE:
        gain = n + k
    else:
        gain = np.full(n, float(n))
    terms = np.zeros(n)
    values = np.empty(n)
    if variant is Variant.CLASSIC:
        terms[1:] = gain[1:] / (k[1:] - 1.0)
        tail = np.cumsum(terms[::-1])[::-1]
        values[:] = r / (n * n) * tail
        values[0] = gain[0] / (n * n)
    elif variant is Variant.BEST_OR_WORST:
        if n == 1:
            return np.array([gain[0]])
        terms[2:] = gain[2:] / ((k[2:] - 1.0) * (k[2:] - 2.0))
        tail = np.cumsum(terms[::-1])[::-1]
        values[:] = 2.0 * r * (r - 1.0) / (n * n) * tail
        values[:2] = 2.0 * gain[:2] / (n * n)
    else:
        tail = np.cumsum(gain[::-1])[::-1]
        values[:] = r / (n * n * (n - 1.0)) * tail
        values[0] = values[1]
    return values
