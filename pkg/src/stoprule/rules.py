"""Cutoff rules executed on batches of candidate orders.

An order is a row of overall ranks (1 = best) in interview order. Only
three relative-rank classes ever matter for acceptance: relatively best
(j = 1), relatively worst (j = k) and relatively second best (j = 2).
"""

from __future__ import annotations

from typing import Tuple

import numpy as np

from stoprule.model import ProblemSpec, Strategy, StrategyKind, Variant


def rank_classes(orders: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Boolean (best, worst, second) class masks of shape (batch, n).

    Tracks the running minimum, second minimum and maximum column by
    column, so the cost is O(batch * n).
    """
    orders = np.atleast_2d(orders)
    batch, n = orders.shape
    best = np.zeros((batch, n), dtype=bool)
    worst = np.zeros((batch, n), dtype=bool)
    second = np.zeros((batch, n), dtype=bool)
    best[:, 0] = True
    worst[:, 0] = True
    cur_min = orders[:, 0].copy()
    cur_max = orders[:, 0].copy()
    second_min = np.full(batch, n + 1, dtype=orders.dtype)
    for c in range(1, n):
        x = orders[:, c]
        is_best = x < cur_min
        best[:, c] = is_best
        worst[:, c] = x > cur_max
        second[:, c] = (x > cur_min) & (x < second_min)
        second_min = np.where(is_best, cur_min, np.minimum(second_min, x))
        cur_min = np.minimum(cur_min, x)
        cur_max = np.maximum(cur_max, x)
    return best, worst, second


def acceptance_mask(spec: ProblemSpec, strat: Strategy, orders: np.ndarray) -> np.ndarray:
    """States (sample, interview) at which ``strat`` would accept."""
    best, worst, second = rank_classes(orders)
    k = np.arange(1, spec.n + 1)
    if spec.variant is Variant.CLASSIC:
        wide = best
    elif spec.variant is Variant.BEST_OR_WORST:
        wide = best | worst
    else:
        wide = best | second
    if strat.kind is StrategyKind.ONE_THRESHOLD:
        eligible = second if spec.variant is Variant.POSTDOC else wide
        return eligible & (k > strat.r)
    return (best & (k > strat.r) & (k <= strat.s)) | (wide & (k > strat.s))


def first_acceptance(
    spec: ProblemSpec, strat: Strategy, orders: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Interview (1-based) and overall rank of the hired candidate per row.

    Rows where nobody is hired get interview 0 and rank 0.
    """
    orders = np.atleast_2d(orders)
    mask = acceptance_mask(spec, strat, orders)
    rows = np.arange(orders.shape[0])
    column = mask.argmax(axis=1)
    hired = mask[rows, column]
    interview = np.where(hired, column + 1, 0)
    rank = np.where(hired, orders[rows, column], 0)
    return interview, rank


def payoff_tables(spec: ProblemSpec) -> Tuple[np.ndarray, np.ndarray]:
    """Float lookup tables (weight by overall rank, multiplier by interview).

    Index 0 of both tables is 0, the payoff of hiring nobody.
    """
    n = spec.n
    weight = np.zeros(n + 1)
    for rank, w in spec.target_weights().items():
        weight[rank] = float(w)
    multiplier = np.zeros(n + 1)
    multiplier[1:] = [float(spec.payoff.multiplier(k, n)) for k in range(1, n + 1)]
    return weight, multiplier
