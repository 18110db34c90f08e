"""Unit tests for the domain types and validation"""

from fractions import Fraction

import numpy as np
import pytest

from stoprule.error import InvalidCombination, InvalidParameters, InvalidThreshold, ValidationError
from stoprule.model import (
    EvalResult,
    Method,
    PayoffKind,
    PayoffRegime,
    ProblemSpec,
    Strategy,
    StrategyKind,
    Variant,
    to_fraction,
    validate,
)


def test_validate_in_range():
    """Classic binary with an in-range cutoff is accepted"""
    validate(ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 10), Strategy.one(3))


def test_validate_unbalanced_m_above_M():
    """m > M is rejected"""
    spec = ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.unbalanced(2, 1), 10)
    with pytest.raises(InvalidParameters) as exc:
        validate(spec, Strategy.two(3, 5))
    assert exc.value.invariant == "m <= M"


def test_validate_unbalanced_m_equals_M_allowed():
    """m = M is a permitted relaxation"""
    validate(ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.unbalanced(1, 1), 10), Strategy.two(3, 5))


def test_validate_postdoc_needs_two_candidates():
    """Postdoc with a single candidate has no second best"""
    with pytest.raises(InvalidCombination):
        validate(ProblemSpec(Variant.POSTDOC, PayoffRegime.binary(), 1), Strategy.one(0))


def test_validate_unbalanced_only_for_best_or_worst():
    """Unbalanced payments only make sense for Best-or-Worst"""
    with pytest.raises(InvalidCombination):
        validate(ProblemSpec(Variant.POSTDOC, PayoffRegime.unbalanced(0, 1), 10), Strategy.two(3, 5))


def test_validate_threshold_ranges():
    """r and s must satisfy 0 <= r <= s <= n-1"""
    classic = ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 5)
    with pytest.raises(InvalidThreshold):
        validate(classic, Strategy.one(5))
    with pytest.raises(InvalidThreshold):
        validate(classic, Strategy.one(-1))

    pd_cost = ProblemSpec(Variant.POSTDOC, PayoffRegime.cost(), 5)
    with pytest.raises(InvalidThreshold):
        validate(pd_cost, Strategy.two(3, 2))
    with pytest.raises(InvalidThreshold):
        validate(pd_cost, Strategy.two(1, 5))
    validate(pd_cost, Strategy.two(0, 0))


def test_validate_strategy_kind_must_match():
    """One-threshold problems refuse pairs and vice versa"""
    with pytest.raises(InvalidCombination):
        validate(ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 5), Strategy.two(1, 2))
    with pytest.raises(InvalidCombination):
        validate(ProblemSpec(Variant.POSTDOC, PayoffRegime.cost(), 5), Strategy.one(1))


def test_validate_parameters_only_with_unbalanced():
    """m and M are rejected on the other regimes"""
    spec = ProblemSpec(Variant.CLASSIC, PayoffRegime(PayoffKind.BINARY, m=1), 5)
    with pytest.raises(InvalidParameters):
        validate(spec, Strategy.one(1))


def test_validate_non_positive_n():
    """n must be a positive integer"""
    with pytest.raises(InvalidParameters):
        validate(ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 0), Strategy.one(0))


def test_validate_fuzz_unbalanced():
    """validate rejects exactly the infeasible (n, r, s, m, M) draws"""
    rng = np.random.default_rng(2024)
    for _ in range(2000):
        n = int(rng.integers(0, 12))
        r = int(rng.integers(-2, 13))
        s = int(rng.integers(-2, 13))
        m = Fraction(int(rng.integers(-2, 5)), 2)
        M = Fraction(int(rng.integers(-2, 5)), 2)
        feasible = n >= 2 and 0 <= r <= s <= n - 1 and 0 <= m <= M and M > 0
        spec = ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.unbalanced(m, M), n)
        try:
            validate(spec, Strategy.two(r, s))
            accepted = True
        except ValidationError:
            accepted = False
        assert accepted == feasible, (n, r, s, m, M)


def test_strategy_canonical_text():
    """Strategies print and parse as r=<int> or r=<int>,s=<int>"""
    assert str(Strategy.one(3)) == "r=3"
    assert str(Strategy.two(3, 5)) == "r=3,s=5"
    assert Strategy.parse("r=3") == Strategy.one(3)
    assert Strategy.parse("r=3, s=5") == Strategy.two(3, 5)
    assert Strategy.parse(str(Strategy.two(0, 7))) == Strategy.two(0, 7)
    with pytest.raises(ValueError):
        Strategy.parse("s=3")


def test_strategy_dict_form():
    """to_dict/from_dict keep the kind and both cutoffs"""
    strat = Strategy.two(2, 4)
    assert strat.to_dict() == {"kind": "two", "r": 2, "s": 4}
    assert Strategy.from_dict(strat.to_dict()) == strat
    assert Strategy.from_dict({"kind": "one", "r": 1}).kind is StrategyKind.ONE_THRESHOLD


def test_payoff_multiplier():
    """Cost and perquisite scale a success at interview k by 1 -/+ k/n"""
    assert PayoffRegime.binary().multiplier(3, 4) == 1
    assert PayoffRegime.cost().multiplier(3, 4) == Fraction(1, 4)
    assert PayoffRegime.perquisite().multiplier(3, 4) == Fraction(7, 4)


def test_unbalanced_parameters_are_exact():
    """Decimal inputs are stored as the rationals they print as"""
    payoff = PayoffRegime.unbalanced(0.1, 0.3)
    assert payoff.m == Fraction(1, 10)
    assert payoff.M == Fraction(3, 10)
    assert to_fraction(0.5) == Fraction(1, 2)


def test_target_weights():
    """Payout per overall rank for each variant"""
    assert ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 5).target_weights() == {1: 1}
    assert ProblemSpec(Variant.POSTDOC, PayoffRegime.binary(), 5).target_weights() == {2: 1}
    assert ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.cost(), 5).target_weights() == {1: 1, 5: 1}
    unbalanced = ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.unbalanced(1, 3), 5)
    assert unbalanced.target_weights() == {1: 3, 5: 1}
    assert unbalanced.two_threshold
    assert unbalanced.payoff_bound() == 3


def test_spec_text():
    """ProblemSpec prints variant, payoff and n"""
    assert str(ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.binary(), 10)) == "bw/binary n=10"


def test_eval_result_exact_pair():
    """Exact results expose numerator/denominator and a matching float"""
    result = EvalResult.from_exact(Fraction(3, 5), Method.CLOSED_FORM)
    assert result.value == 0.6
    assert (result.exact_num, result.exact_den) == (3, 5)
    assert result.to_dict() == {"value": 0.6, "exact": "3/5", "method": "closed-form"}

    approx = EvalResult.from_float(0.25, Method.MONTE_CARLO)
    assert approx.exact_num is None
    assert approx.to_dict()["exact"] is None


if __name__ == "__main__":
    pytest.main([__file__])
