"""Unit tests for batched rule execution"""

from itertools import permutations

import numpy as np
import pytest
from conftest import all_regimes, feasible_strategies

from stoprule.model import PayoffRegime, ProblemSpec, Strategy, Variant
from stoprule.montecarlo import run_strategy
from stoprule.rules import acceptance_mask, first_acceptance, payoff_tables, rank_classes


def test_rank_classes_small_order():
    """Overall ranks 3,1,4,2: best at 1 and 2, worst at 1 and 3, second at 4"""
    best, worst, second = rank_classes(np.array([[3, 1, 4, 2]]))
    assert best[0].tolist() == [True, True, False, False]
    assert worst[0].tolist() == [True, False, True, False]
    assert second[0].tolist() == [False, False, False, True]


def test_rank_classes_match_relative_ranks():
    """Class masks agree with relative ranks computed directly"""
    rng = np.random.default_rng(11)
    orders = np.array([rng.permutation(np.arange(1, 9)) for _ in range(200)])
    best, worst, second = rank_classes(orders)
    for row, order in enumerate(orders):
        for c in range(8):
            j = int(np.sum(order[: c + 1] <= order[c]))
            assert best[row, c] == (j == 1)
            assert worst[row, c] == (j == c + 1)
            assert second[row, c] == (j == 2)


def test_acceptance_mask_respects_cutoffs():
    """Nothing is accepted at or before r; stage 1 of a pair accepts only the best"""
    spec = ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.unbalanced(1, 3), 6)
    orders = np.array(list(permutations(range(1, 7))))
    mask = acceptance_mask(spec, Strategy.two(2, 4), orders)
    best, worst, _ = rank_classes(orders)
    assert not mask[:, :2].any()
    assert np.array_equal(mask[:, 2:4], best[:, 2:4])
    assert np.array_equal(mask[:, 4:], (best | worst)[:, 4:])


def test_first_acceptance_no_hire():
    """Rows where the rule never fires report interview 0 and rank 0"""
    spec = ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 4)
    interview, rank = first_acceptance(spec, Strategy.one(1), np.array([[1, 2, 3, 4], [2, 1, 3, 4]]))
    assert interview.tolist() == [0, 2]
    assert rank.tolist() == [0, 1]


def test_first_acceptance_matches_sequential_run():
    """The batched path pays what the one-order interpreter pays, every order at n = 5"""
    n = 5
    orders = np.array(list(permutations(range(1, n + 1))))
    for variant, payoff in all_regimes():
        spec = ProblemSpec(variant, payoff, n)
        weight, multiplier = payoff_tables(spec)
        for strat in feasible_strategies(spec):
            interview, rank = first_acceptance(spec, strat, orders)
            batched = weight[rank] * multiplier[interview]
            for order, paid in zip(orders, batched):
                assert run_strategy(order.tolist(), spec, strat) == pytest.approx(paid), (spec, strat)


def test_payoff_tables_bounds():
    """Cost pays in [0, 1), perquisite pays 0 or (1, 2], nobody hired pays 0"""
    n = 7
    cost = ProblemSpec(Variant.CLASSIC, PayoffRegime.cost(), n)
    weight, multiplier = payoff_tables(cost)
    assert weight[0] == 0.0 and multiplier[0] == 0.0
    assert np.all((multiplier[1:] >= 0.0) & (multiplier[1:] < 1.0))
    assert multiplier[n] == 0.0

    perq = ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.perquisite(), n)
    weight, multiplier = payoff_tables(perq)
    assert weight[1] == 1.0 and weight[n] == 1.0
    assert np.all((multiplier[1:] > 1.0) & (multiplier[1:] <= 2.0))

    rng = np.random.default_rng(3)
    orders = np.array([rng.permutation(np.arange(1, n + 1)) for _ in range(500)])
    interview, rank = first_acceptance(perq, Strategy.one(2), orders)
    paid = weight[rank] * multiplier[interview]
    assert np.all((paid == 0.0) | ((paid > 1.0) & (paid <= 2.0)))


def test_payoff_tables_unbalanced_weights():
    """Best pays M and worst pays m"""
    spec = ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.unbalanced(1, 3), 5)
    weight, multiplier = payoff_tables(spec)
    assert weight.tolist() == [0.0, 3.0, 0.0, 0.0, 0.0, 1.0]
    assert multiplier.tolist() == [0.0, 1.0, 1.0, 1.0, 1.0, 1.0]


if __name__ == "__main__":
    pytest.main([__file__])
