"""Limit behaviour of the cutoff rules as n grows.

Houses the real branches of the Lambert W function, the digamma function,
the asymptotic cutoff ratios (ACV) and limit payoffs (AMP) of every table
cell, and the scaled profiles g(x) = lim E_n(nx) and h(x, y) = lim E_n(nx, ny)
that the finite-n payoffs converge to.

Each constant is obtained by bracketed root finding on its defining
equation; where a Lambert-W closed form exists it is computed as well so
the two routes can be compared.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import optimize

from stoprule.error import ConvergenceError, DomainError
from stoprule.model import PayoffKind, PayoffRegime, Variant

logger = logging.getLogger(__name__)

EULER_GAMMA = float(np.euler_gamma)
BRANCH_POINT = -1.0 / math.e
_BRANCH_SLACK = 1e-15
_HALLEY_TOL = 1e-14
_HALLEY_MAX_ITER = 50
RESIDUAL_TOL = 1e-12


# -- special functions -------------------------------------------------------


def _halley(x: float, w: float) -> float:
    for _ in range(_HALLEY_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        step = f / denom
        w -= step
        if abs(step) <= _HALLEY_TOL * (1.0 + abs(w)):
            break
    residual = abs(w * math.exp(w) - x)
    if residual > RESIDUAL_TOL * max(abs(x), 1e-300) and residual > 1e-300:
        raise ConvergenceError(f"Halley iteration for W({x!r}) stalled at residual {residual:.3e}")
    return w


def _branch_series(x: float, sign: float) -> float:
    p = sign * math.sqrt(max(0.0, 2.0 * (math.e * x + 1.0)))
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3


def lambert_w0(x: float) -> float:
    """Principal branch W0: the w >= -1 with w*exp(w) = x.

    Raises:
        DomainError: x < -1/e.
    """
    if x < BRANCH_POINT - _BRANCH_SLACK:
        raise DomainError(f"lambert_w0 is defined for x >= -1/e, got {x!r}")
    if x <= BRANCH_POINT + _BRANCH_SLACK:
        return -1.0
    if x == 0.0:
        return 0.0
    if x < -0.25:
        w = _branch_series(x, 1.0)
    elif x < 3.0:
        w = math.log1p(x)
    else:
        l1 = math.log(x)
        l2 = math.log(l1)
        w = l1 - l2 + l2 / l1
    return max(_halley(x, w), -1.0)


def lambert_wm1(x: float) -> float:
    """Lower branch W-1: the w <= -1 with w*exp(w) = x, for -1/e <= x < 0.

    Raises:
        DomainError: x outside [-1/e, 0).
    """
    if x < BRANCH_POINT - _BRANCH_SLACK or x >= 0.0:
        raise DomainError(f"lambert_wm1 is defined on [-1/e, 0), got {x!r}")
    if x <= BRANCH_POINT + _BRANCH_SLACK:
        return -1.0
    if x < -0.25:
        w = _branch_series(x, -1.0)
    else:
        l1 = math.log(-x)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    return min(_halley(x, w), -1.0)


def digamma(x: float) -> float:
    """psi(x) for x > 0: recurrence up to x >= 10, then the asymptotic series.

    Raises:
        DomainError: x <= 0.
    """
    if x <= 0:
        raise DomainError(f"digamma is implemented for x > 0, got {x!r}")
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv = 1.0 / x
    inv2 = inv * inv
    tail = inv2 * (1 / 12 - inv2 * (1 / 120 - inv2 * (1 / 252 - inv2 * (1 / 240 - inv2 / 132))))
    return shift + math.log(x) - 0.5 * inv - tail


def harmonic(n: int) -> Fraction:
    """Exact H_n = 1 + 1/2 + ... + 1/n (H_0 = 0)."""
    total = Fraction(0)
    for i in range(1, n + 1):
        total += Fraction(1, i)
    return total


def harmonic_float(n: int) -> float:
    """H_n via digamma: psi(n + 1) + gamma."""
    return digamma(n + 1.0) + EULER_GAMMA if n > 0 else 0.0


# -- scaled profiles -----------------------------------------------------------


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


_PROFILES: Dict[Tuple[Variant, PayoffKind], Callable[[float], float]] = {
    (Variant.CLASSIC, PayoffKind.BINARY): lambda x: -_xlogx(x),
    (Variant.CLASSIC, PayoffKind.COST): lambda x: x * (x - 1.0) - _xlogx(x),
    (Variant.CLASSIC, PayoffKind.PERQUISITE): lambda x: x * (1.0 - x) - _xlogx(x),
    (Variant.BEST_OR_WORST, PayoffKind.BINARY): lambda x: 2.0 * x * (1.0 - x),
    (Variant.BEST_OR_WORST, PayoffKind.COST): lambda x: 2.0 * x * (1.0 - x) + 2.0 * x * _xlogx(x),
    (Variant.BEST_OR_WORST, PayoffKind.PERQUISITE): lambda x: 2.0 * x * (1.0 - x) - 2.0 * x * _xlogx(x),
    (Variant.POSTDOC, PayoffKind.BINARY): lambda x: x * (1.0 - x),
    (Variant.POSTDOC, PayoffKind.PERQUISITE): lambda x: x * (1.0 - x) * (3.0 + x) / 2.0,
}


def scaled_profile(variant: Variant, payoff: PayoffKind, x: float) -> float:
    """g(x) = lim_n E_n(floor(n x)) for the one-threshold problems.

    Raises:
        DomainError: x outside [0, 1], or the problem has two thresholds.
    """
    profile = _PROFILES.get((variant, payoff))
    if profile is None:
        raise DomainError(f"{variant.value}/{payoff.value} has a two-dimensional profile")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"profile argument must lie in [0, 1], got {x!r}")
    return profile(x) if x > 0 else 0.0


def scaled_profile2(
    variant: Variant, payoff: PayoffRegime, x: float, y: float
) -> float:
    """h(x, y) = lim_n E_n(nx, ny) for the two-threshold problems.

    Raises:
        DomainError: not 0 <= x <= y <= 1, or the problem has one threshold.
    """
    if not 0.0 <= x <= y <= 1.0:
        raise DomainError(f"profile arguments must satisfy 0 <= x <= y <= 1, got ({x!r}, {y!r})")
    if x == 0.0:
        return 0.0
    if payoff.kind is PayoffKind.UNBALANCED and variant is Variant.BEST_OR_WORST:
        m, M = float(payoff.m), float(payoff.M)
        return (M + m) * x - (M + m) * x * y + M * x * math.log(y / x)
    if variant is Variant.POSTDOC and payoff.kind is PayoffKind.COST:
        return x * (
            2.0 - 6.0 * y + y * y + 4.0 * x - x * x + 2.0 * (1.0 + y) * math.log(y) - 2.0 * math.log(x)
        ) / 2.0
    raise DomainError(f"{variant.value}/{payoff.kind.value} has a one-dimensional profile")


def profile_maximizer(variant: Variant, payoff: PayoffKind) -> float:
    """Interior maximiser of g, located as the zero of a central-difference g'."""
    step = 1e-5

    def slope(x: float) -> float:
        return (scaled_profile(variant, payoff, x + step) - scaled_profile(variant, payoff, x - step)) / (2 * step)

    try:
        return optimize.brentq(slope, 0.01, 0.99, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    except ValueError as exc:
        raise ConvergenceError(f"no interior maximum for {variant.value}/{payoff.value}") from exc


# -- constants -----------------------------------------------------------------


def _solve(
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    lo: float,
    hi: float,
    name: str,
) -> float:
    try:
        x = optimize.bisect(f, lo, hi, xtol=1e-15, maxiter=200)
    except ValueError as exc:
        raise ConvergenceError(f"bracket [{lo}, {hi}] does not isolate {name}") from exc
    try:
        polished = optimize.newton(f, x, fprime=fprime, tol=1e-16, maxiter=20)
        if lo <= polished <= hi and abs(f(polished)) <= abs(f(x)):
            x = float(polished)
    except RuntimeError:
        logger.debug("newton polish failed, keeping bisection root", extra={"constant": name})
    if abs(f(x)) >= RESIDUAL_TOL:
        raise ConvergenceError(f"{name}: residual {abs(f(x)):.3e} above {RESIDUAL_TOL}")
    return x


@dataclass(frozen=True)
class Constant:
    """One asymptotic constant of the table.

    ``value`` comes from bracketed root finding on ``defining_equation``;
    ``closed_form`` is the independent Lambert-W (or algebraic) route, when
    one exists. ``residual`` is |f(value)| for the defining equation f.
    """

    name: str
    variant: Variant
    payoff: PayoffKind
    value: float
    defining_equation: str
    limit_payoff: float
    residual: float
    closed_form: Optional[float] = None


def _constant(
    name: str,
    variant: Variant,
    payoff: PayoffKind,
    equation: str,
    f: Callable[[float], float],
    fprime: Callable[[float], float],
    reported: float,
    closed_form: Optional[float],
    limit_payoff: Callable[[float], float],
) -> Constant:
    value = _solve(f, fprime, reported - 0.1, reported + 0.1, name)
    return Constant(
        name=name,
        variant=variant,
        payoff=payoff,
        value=value,
        defining_equation=equation,
        limit_payoff=limit_payoff(value),
        residual=abs(f(value)),
        closed_form=closed_form,
    )


@lru_cache(maxsize=1)
def solve_pd_cost_constants() -> Tuple[float, float]:
    """(alpha, beta) maximising the Postdoc cost profile h.

    beta is solved first on its own equation, then alpha given beta.

    Raises:
        ConvergenceError: if a bracket fails.
    """
    beta = _solve(
        lambda b: -2.0 + 1.0 / b + b + math.log(b),
        lambda b: -1.0 / (b * b) + 1.0 + 1.0 / b,
        0.29422,
        0.49422,
        "beta",
    )
    base = 1.0 - 1.0 / beta - 2.0 * beta - beta * beta / 2.0
    alpha = _solve(
        lambda a: base + 4.0 * a - 1.5 * a * a - math.log(a),
        lambda a: 4.0 - 3.0 * a - 1.0 / a,
        0.07248,
        min(0.27248, beta),
        "alpha",
    )
    logger.debug("solved postdoc cost constants", extra={"alpha": alpha, "beta": beta})
    return alpha, beta


@lru_cache(maxsize=1)
def _constants() -> Tuple[Constant, ...]:
    alpha, beta = solve_pd_cost_constants()
    pd_cost_amp = scaled_profile2(Variant.POSTDOC, PayoffRegime.cost(), alpha, beta)
    sqrt13 = math.sqrt(13.0)
    table = (
        _constant(
            "inv_e", Variant.CLASSIC, PayoffKind.BINARY, "log(x) + 1 = 0",
            lambda x: math.log(x) + 1.0, lambda x: 1.0 / x,
            0.3679, math.exp(-1.0), lambda x: x,
        ),
        _constant(
            "rho", Variant.CLASSIC, PayoffKind.COST, "-2 + 2x - log(x) = 0",
            lambda x: -2.0 + 2.0 * x - math.log(x), lambda x: 2.0 - 1.0 / x,
            0.20318, -0.5 * lambert_w0(-2.0 * math.exp(-2.0)), lambda x: x - x * x,
        ),
        _constant(
            "mu", Variant.CLASSIC, PayoffKind.PERQUISITE, "-2x - log(x) = 0",
            lambda x: -2.0 * x - math.log(x), lambda x: -2.0 - 1.0 / x,
            0.42630, 0.5 * lambert_w0(2.0), lambda x: x * x + x,
        ),
        _constant(
            "bw_half", Variant.BEST_OR_WORST, PayoffKind.BINARY, "1 - 2x = 0",
            lambda x: 1.0 - 2.0 * x, lambda x: -2.0,
            0.5, 0.5, lambda x: 2.0 * x * (1.0 - x),
        ),
        _constant(
            "theta", Variant.BEST_OR_WORST, PayoffKind.COST, "2x log(x) = x - 1",
            lambda x: 2.0 * x * math.log(x) - x + 1.0, lambda x: 2.0 * math.log(x) + 1.0,
            0.284668, -1.0 / (2.0 * lambert_wm1(-1.0 / (2.0 * math.sqrt(math.e)))), lambda x: x - x * x,
        ),
        _constant(
            "vartheta", Variant.BEST_OR_WORST, PayoffKind.PERQUISITE, "1 - 3x - 2x log(x) = 0",
            lambda x: 1.0 - 3.0 * x - 2.0 * x * math.log(x), lambda x: -5.0 - 2.0 * math.log(x),
            0.552001, 1.0 / (2.0 * lambert_w0(math.exp(1.5) / 2.0)), lambda x: x * x + x,
        ),
        _constant(
            "pd_half", Variant.POSTDOC, PayoffKind.BINARY, "1 - 2x = 0",
            lambda x: 1.0 - 2.0 * x, lambda x: -2.0,
            0.5, 0.5, lambda x: x * (1.0 - x),
        ),
        Constant(
            "alpha", Variant.POSTDOC, PayoffKind.COST, alpha,
            "1 - 1/beta - 2beta - beta^2/2 + 4x - 3x^2/2 - log(x) = 0",
            pd_cost_amp,
            abs(1.0 - 1.0 / beta - 2.0 * beta - beta * beta / 2.0 + 4.0 * alpha - 1.5 * alpha * alpha - math.log(alpha)),
        ),
        Constant(
            "beta", Variant.POSTDOC, PayoffKind.COST, beta,
            "-2 + 1/x + x + log(x) = 0",
            pd_cost_amp,
            abs(-2.0 + 1.0 / beta + beta + math.log(beta)),
        ),
        _constant(
            "pd_perq", Variant.POSTDOC, PayoffKind.PERQUISITE, "3 - 4x - 3x^2 = 0",
            lambda x: 3.0 - 4.0 * x - 3.0 * x * x, lambda x: -4.0 - 6.0 * x,
            0.53518, (sqrt13 - 2.0) / 3.0, lambda x: x * (1.0 - x) * (3.0 + x) / 2.0,
        ),
    )
    logger.info("computed asymptotic constants", extra={"count": len(table)})
    return table


def constants() -> List[Constant]:
    """All constants of the comparison table, computed from their equations."""
    return list(_constants())


def constant(name: str) -> Constant:
    for entry in _constants():
        if entry.name == name:
            return entry
    raise KeyError(name)


def unbalanced_limits(m: float, M: float) -> Tuple[float, float, float]:
    """Limits (r/n, s/n, payoff) of the unbalanced Best-or-Worst optimum."""
    m, M = float(m), float(M)
    if not 0.0 <= m <= M or M <= 0.0:
        raise DomainError(f"need 0 <= m <= M and M > 0, got m={m}, M={M}")
    grow = math.exp(-1.0 + m / M)
    return grow * M / (M + m), M / (M + m), grow * M * M / (M + m)


@dataclass(frozen=True)
class AsymptoticCell:
    """(ACV, AMP) of one table cell; ``acv`` has two entries for two cutoffs."""

    acv: Tuple[float, ...]
    amp: float


def asymptotic_cell(variant: Variant, payoff: PayoffRegime) -> AsymptoticCell:
    if payoff.kind is PayoffKind.UNBALANCED:
        x, y, amp = unbalanced_limits(payoff.m, payoff.M)
        return AsymptoticCell((x, y), amp)
    if variant is Variant.POSTDOC and payoff.kind is PayoffKind.COST:
        a, b = constant("alpha"), constant("beta")
        return AsymptoticCell((a.value, b.value), a.limit_payoff)
    for entry in _constants():
        if entry.variant is variant and entry.payoff is payoff.kind:
            return AsymptoticCell((entry.value,), entry.limit_payoff)
    raise KeyError((variant, payoff.kind))
