"""Argmax scans over cutoff rules.

Scans cover every feasible rule, 0 <= r <= n-1 and 0 <= r <= s <= n-1.
Ties go to the smallest r, then the smallest s, except that for n >= 3 the
rule r = 0 wins only when it is strictly better than every r >= 1.

With r = 0 the first candidate is hired whatever s is, so the pairs (0, s)
are one rule and are compared once, as (0, 0).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from operator import truediv
from typing import Any, Callable, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from stoprule.config import Config, resolve
from stoprule.error import InvalidCombination, InvalidParameters
from stoprule.exact.evaluators import (
    Scalar,
    evaluate,
    one_threshold_profile,
    one_threshold_profile_exact,
    point_value,
)
from stoprule.model import (
    EvalResult,
    PayoffKind,
    PayoffRegime,
    ProblemSpec,
    Strategy,
    Variant,
    validate_spec,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ArgmaxResult:
    """Best strategy found by a scan.

    Attributes:
        best_strategy: Maximising cutoff rule.
        best_value: Its expected payoff, exact when n <= ``Config.exact_limit``.
        scanned: Number of strategies whose payoff was compared.
    """

    best_strategy: Strategy
    best_value: EvalResult
    scanned: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "strategy": str(self.best_strategy),
            "value": self.best_value.to_dict(),
            "scanned": self.scanned,
        }


def _first_max(values: Sequence[Any], start: int) -> int:
    # max() keeps the first of equal elements
    return max(range(start, len(values)), key=values.__getitem__)


def _zero_beats(spec: ProblemSpec, zero: Strategy, best: Strategy, exact: bool) -> bool:
    """True when the r = 0 rule pays strictly more than ``best``."""
    return point_value(spec, zero, exact) > point_value(spec, best, exact)


def _closed_form_numerators(spec: ProblemSpec) -> Optional[np.ndarray]:
    """Integer payoff numerators over a common denominator, indexed by r.

    Only for the cells with a polynomial closed form; integer comparison
    keeps exact ties (odd n) resolved toward the smaller r at any n.
    """
    n, kind = spec.n, spec.payoff.kind
    dtype = np.int64 if n <= 100_000 else object
    r = np.arange(n, dtype=np.int64).astype(dtype)
    if spec.variant is Variant.BEST_OR_WORST and kind is PayoffKind.BINARY:
        return 2 * r * (n - r)
    if spec.variant is Variant.POSTDOC and kind is PayoffKind.BINARY:
        r = np.maximum(r, 1)
        return r * (n - r)
    if spec.variant is Variant.POSTDOC and kind is PayoffKind.PERQUISITE:
        r = np.maximum(r, 1)
        return r * (n - r) * (3 * n + 1 + r)
    return None


def argmax_one(spec: ProblemSpec, config: Config | None = None) -> ArgmaxResult:
    """Best one-threshold rule by exhaustive scan over 0 <= r <= n-1.

    Raises:
        InvalidCombination: the problem uses two-threshold rules.
    """
    config = resolve(config)
    validate_spec(spec)
    if spec.two_threshold:
        raise InvalidCombination(
            f"{spec.variant.value}/{spec.payoff.kind.value} needs argmax_two",
            invariant="one-threshold problem => r",
        )
    n = spec.n
    start = 0 if n <= 2 else 1
    numerators = None if n <= 2 else _closed_form_numerators(spec)
    if numerators is not None:
        best = int(np.argmax(numerators[start:])) + start
        route = "closed-form"
    elif n <= config.scan_exact_limit:
        best = _first_max(one_threshold_profile_exact(spec), start)
        route = "exact"
    else:
        best = int(np.argmax(one_threshold_profile(spec)[start:])) + start
        route = "float"
    strategy = Strategy.one(best)
    if n >= 3 and _zero_beats(spec, Strategy.one(0), strategy, n <= config.exact_limit):
        strategy = Strategy.one(0)
    logger.info(
        "one-threshold scan done",
        extra={"spec": str(spec), "route": route, "best": str(strategy), "scanned": n},
    )
    return ArgmaxResult(strategy, evaluate(spec, strategy, config), n)


def bw_argmax(n: int, config: Config | None = None) -> ArgmaxResult:
    """Best Best-or-Worst binary cutoff, found by scan (floor(n/2) for n >= 3)."""
    if n < 3:
        raise InvalidParameters(f"bw_argmax needs n >= 3, got {n}", invariant="n >= 3")
    return argmax_one(ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.binary(), n), config)


# -- two thresholds ------------------------------------------------------------


def _pair_tables(spec: ProblemSpec, exact: bool) -> Tuple[Sequence[Scalar], Sequence[Scalar]]:
    """(row, col) with payoff(r, s) = r * (row[s] - col[r]) for 1 <= r <= s <= n-1."""
    n = spec.n
    if exact:
        zero: Scalar = Fraction(0)
        ratio: Callable[[Any, Any], Scalar] = Fraction
        harm = list(accumulate((Fraction(1, i) for i in range(1, n + 1)), initial=zero))
    else:
        zero = 0.0
        ratio = truediv
        harm = np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, n + 1))))
    row = [zero] * n
    col = [zero] * n
    if spec.payoff.kind is PayoffKind.UNBALANCED:
        M = spec.payoff.M if exact else float(spec.payoff.M)
        m = spec.payoff.m if exact else float(spec.payoff.m)
        for s in range(1, n):
            row[s] = (M * harm[s - 1] + (M + m) * ratio(n - s, n - 1)) / n
            col[s] = M * harm[s - 1] / n
    else:
        stage_one = zero  # sum_{k=2}^{t} (n-k)^2/(k-1)
        for t in range(1, n):
            if t >= 2:
                stage_one += ratio((n - t) * (n - t), t - 1)
            col[t] = stage_one / (n * n * (n - 1))
            if t == 1:
                wide = ratio(n - 2, n * n)
            else:
                # sum_{k>t} (n-k)/((k-1)(k-2)) telescoped
                tail = (n - 2) * (ratio(1, t - 1) - ratio(1, n - 1)) - (harm[n - 1] - harm[t - 1])
                wide = (t - 1) * tail / (n * n)
            row[t] = col[t] + wide
    if exact:
        return row, col
    return np.asarray(row, dtype=float), np.asarray(col, dtype=float)


def _scan_pairs(
    row: Sequence[Scalar],
    col: Sequence[Scalar],
    s_values: Iterable[int],
    r_bounds: Callable[[int], Tuple[int, int]],
    step: int,
    exact: bool,
) -> Tuple[Optional[Tuple[Scalar, int, int]], int]:
    best: Optional[Tuple[Scalar, int, int]] = None
    scanned = 0
    for s in s_values:
        lo, hi = r_bounds(s)
        if lo > hi:
            continue
        if exact:
            rs = range(lo, hi + 1, step)
            values = [r * (row[s] - col[r]) for r in rs]
            i = _first_max(values, 0)
            value, r = values[i], rs[i]
            scanned += len(rs)
        else:
            rs_arr = np.arange(lo, hi + 1, step)
            values_arr = rs_arr * (row[s] - col[rs_arr])
            i = int(np.argmax(values_arr))
            value, r = float(values_arr[i]), int(rs_arr[i])
            scanned += len(rs_arr)
        if best is None or value > best[0] or (value == best[0] and r < best[1]):
            best = (value, r, s)
    return best, scanned


def argmax_two(
    spec: ProblemSpec, config: Config | None = None, full_scan: bool = False
) -> ArgmaxResult:
    """Best two-threshold rule for Unbalanced and Postdoc-cost problems.

    Full grid up to ``Config.full_scan_limit``; above it a coarse grid with
    stride ceil(n / coarse_points) is refined within one stride of its best
    point, unless ``full_scan`` is set.

    Raises:
        InvalidCombination: the problem uses one-threshold rules.
    """
    config = resolve(config)
    validate_spec(spec)
    if not spec.two_threshold:
        raise InvalidCombination(
            f"{spec.variant.value}/{spec.payoff.kind.value} needs argmax_one",
            invariant="two-threshold problem => r,s",
        )
    n = spec.n
    logger.debug("two-threshold scan starting", extra={"spec": str(spec), "full_scan": full_scan})
    if n <= 2:
        pairs = [(r, s) for s in range(n) for r in range(s + 1)]
        values = [point_value(spec, Strategy.two(r, s), True) for r, s in pairs]
        ranked = sorted(range(len(pairs)), key=lambda i: (-values[i], pairs[i]))
        r, s = pairs[ranked[0]]
        strategy = Strategy.two(r, s)
        return ArgmaxResult(strategy, evaluate(spec, strategy, config), len(pairs))

    exact = n <= config.pair_exact_limit
    row, col = _pair_tables(spec, exact)
    if exact or full_scan or n <= config.full_scan_limit:
        best, scanned = _scan_pairs(row, col, range(1, n), lambda s: (1, s), 1, exact)
        route = "full"
    else:
        stride = math.ceil(n / config.coarse_points)
        coarse, scanned = _scan_pairs(
            row, col, range(1, n, stride), lambda s: (1, s), stride, exact
        )
        _, r0, s0 = coarse
        s_window = range(max(1, s0 - stride), min(n - 1, s0 + stride) + 1)
        best, fine = _scan_pairs(
            row,
            col,
            s_window,
            lambda s: (max(1, r0 - stride), min(s, r0 + stride)),
            1,
            exact,
        )
        scanned += fine
        route = f"coarse-to-fine(stride={stride})"
    _, r, s = best
    strategy = Strategy.two(r, s)
    scanned += 1
    if _zero_beats(spec, Strategy.two(0, 0), strategy, n <= config.exact_limit):
        strategy = Strategy.two(0, 0)
    logger.info(
        "two-threshold scan done",
        extra={"spec": str(spec), "route": route, "best": str(strategy), "scanned": scanned},
    )
    return ArgmaxResult(strategy, evaluate(spec, strategy, config), scanned)


def argmax(spec: ProblemSpec, config: Config | None = None, full_scan: bool = False) -> ArgmaxResult:
    """``argmax_two`` for two-threshold problems, ``argmax_one`` otherwise."""
    if spec.two_threshold:
        return argmax_two(spec, config, full_scan)
    return argmax_one(spec, config)
