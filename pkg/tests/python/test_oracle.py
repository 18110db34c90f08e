"""Unit tests for the enumeration and dynamic-programming oracles"""

import io
from fractions import Fraction

import pytest
from conftest import all_regimes, feasible_strategies

from stoprule.config import ConfigBuilder
from stoprule.error import DomainError, NotThreshold, SizeLimit
from stoprule.exact import argmax, classic_binary, evaluate
from stoprule.model import Method, PayoffRegime, ProblemSpec, Strategy, Variant
from stoprule.oracle import (
    check_thresholds,
    dp_solve,
    enumerate_permutations,
    extract_thresholds,
    overall_rank_prob,
    policy_to_csv,
    recurrence_check_T,
)


def test_overall_rank_prob_examples():
    """Hypergeometric conditional law of the overall rank"""
    for n in (3, 7, 12):
        for k in range(1, n + 1):
            assert overall_rank_prob(n, k, 1, 1) == Fraction(k, n)
    for j in range(1, 6):
        assert overall_rank_prob(5, 5, j, j) == 1
    assert overall_rank_prob(4, 2, 2, 3) == Fraction(1, 3)
    assert overall_rank_prob(6, 3, 2, 1) == 0


def test_overall_rank_prob_sums_to_one():
    """Every state (k, j) has a full distribution over i"""
    for n in range(1, 41, 3):
        for k in range(1, n + 1):
            for j in range(1, k + 1):
                assert sum(overall_rank_prob(n, k, j, i) for i in range(1, n + 1)) == 1


def test_overall_rank_prob_domain():
    """States outside 1 <= j <= k <= n are refused"""
    with pytest.raises(DomainError):
        overall_rank_prob(4, 5, 1, 1)
    with pytest.raises(DomainError):
        overall_rank_prob(4, 2, 3, 1)
    with pytest.raises(DomainError):
        overall_rank_prob(4, 2, 1, 0)


def test_dp_classic_binary():
    """Classic n = 10: root is the best cutoff value, accepted iff best after 3"""
    spec = ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 10)
    policy = dp_solve(spec)
    assert policy.exact
    best = max(classic_binary(10, r).exact for r in range(10))
    assert policy.root.exact == best
    assert policy.root.method is Method.DP
    for state in policy.states():
        assert policy.decision(state.k, state.j) == (state.j == 1 and state.k > 3)
    assert extract_thresholds(policy) == Strategy.one(3)


def test_dp_bw_binary():
    """Best-or-Worst n = 10: root 5/9, accept best or worst after interview 5"""
    policy = dp_solve(ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.binary(), 10))
    assert policy.root.exact == Fraction(5, 9)
    for state in policy.states():
        expected = state.k > 5 and state.j in (1, state.k)
        assert policy.decision(state.k, state.j) == expected


def test_dp_postdoc_binary():
    """Postdoc n = 10: root 5/18, only relatively second best after 5 is accepted"""
    policy = dp_solve(ProblemSpec(Variant.POSTDOC, PayoffRegime.binary(), 10))
    assert policy.root.exact == Fraction(5, 18)
    for state in policy.states():
        assert policy.decision(state.k, state.j) == (state.j == 2 and state.k > 5)
    assert extract_thresholds(policy) == Strategy.one(5)


def test_dp_float_mode_matches_exact():
    """Above dp_exact_limit the float policy agrees with the rational one"""
    spec = ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.cost(), 30)
    exact_policy = dp_solve(spec)
    float_policy = dp_solve(spec, ConfigBuilder().with_dp_exact_limit(10).build())
    assert not float_policy.exact
    assert float_policy.root.exact_num is None
    assert float_policy.root.value == pytest.approx(exact_policy.root.value, rel=1e-12)
    assert extract_thresholds(float_policy) == extract_thresholds(exact_policy)


def test_dp_size_limit():
    """dp_solve refuses n above dp_size_limit"""
    config = ConfigBuilder().with_dp_exact_limit(5).with_dp_size_limit(20).build()
    with pytest.raises(SizeLimit):
        dp_solve(ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 21), config)


def test_enumerate_examples():
    """Averages over all 4! orders"""
    assert enumerate_permutations(
        ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 4), Strategy.one(1)
    ).exact == Fraction(11, 24)
    assert enumerate_permutations(
        ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.binary(), 4), Strategy.one(2)
    ).exact == Fraction(2, 3)
    result = enumerate_permutations(ProblemSpec(Variant.POSTDOC, PayoffRegime.binary(), 4), Strategy.one(2))
    assert result.exact == Fraction(1, 3)
    assert result.method is Method.ENUMERATION


def test_enumerate_size_limit():
    """n! orders are only walked up to enumeration_limit"""
    with pytest.raises(SizeLimit) as exc:
        enumerate_permutations(ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 11), Strategy.one(4))
    assert exc.value.limit == 10


def test_extract_thresholds_bw_binary():
    """Best-or-Worst n = 50 waits exactly n/2 interviews"""
    policy = dp_solve(ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.binary(), 50))
    assert extract_thresholds(policy) == Strategy.one(25)


def test_extract_thresholds_unbalanced():
    """m = 1, M = 3 at n = 200 puts the cutoffs near 0.385 n and 0.75 n"""
    n = 200
    policy = dp_solve(ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.unbalanced(1, 3), n))
    strat = extract_thresholds(policy)
    assert strat.r / n == pytest.approx(0.38506, abs=0.025)
    assert strat.s / n == pytest.approx(0.75, abs=0.025)


def test_extract_thresholds_postdoc_perquisite():
    """The DP cutoff sits on the scanned maximiser"""
    spec = ProblemSpec(Variant.POSTDOC, PayoffRegime.perquisite(), 50)
    strat = extract_thresholds(dp_solve(spec))
    assert abs(strat.r - argmax(spec).best_strategy.r) <= 1


def test_policy_value_shapes():
    """Reject values never increase; the best's accept value never decreases"""
    for variant, payoff in (
        (Variant.CLASSIC, PayoffRegime.binary()),
        (Variant.BEST_OR_WORST, PayoffRegime.binary()),
        (Variant.BEST_OR_WORST, PayoffRegime.perquisite()),
        (Variant.CLASSIC, PayoffRegime.perquisite()),
    ):
        policy = dp_solve(ProblemSpec(variant, payoff, 25))
        for k in range(1, 25):
            assert policy.reject_value(k - 1) >= policy.reject_value(k)
            assert policy.accept_value(k + 1, 1) >= policy.accept_value(k, 1)
        assert policy.reject_value(25) == 0


def test_policy_accept_value_domain():
    """Unknown states raise DomainError"""
    policy = dp_solve(ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 4))
    with pytest.raises(DomainError):
        policy.accept_value(2, 3)


@pytest.mark.parametrize("n", [10, 25, 50, 100])
def test_dp_root_dominates_best_cutoff_rule(n):
    """No cutoff rule beats backward induction, for every regime"""
    for variant, payoff in all_regimes():
        spec = ProblemSpec(variant, payoff, n)
        policy = dp_solve(spec)
        found = argmax(spec)
        assert policy.exact and found.best_value.exact is not None
        assert policy.root.exact >= found.best_value.exact, (spec, found.best_strategy)
        if n == 10:
            for strat in feasible_strategies(spec):
                assert policy.root.exact >= evaluate(spec, strat).exact, (spec, strat)


def test_recurrence_check():
    """The backward recurrence for T_n(r) reproduces r(n-r)/(n(n-1))"""
    for n in range(2, 301):
        assert recurrence_check_T(n) == (True, None)
    with pytest.raises(DomainError):
        recurrence_check_T(1)


def test_tampered_policy_is_not_threshold():
    """Rejecting the best at interview 4 after accepting it at 3 is reported"""
    policy = dp_solve(ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 5))
    policy.accept[4][1] = Fraction(0)
    report = check_thresholds(policy)
    assert not report.ok
    assert report.thresholds == {"best": 2}
    assert [(v.k, v.j) for v in report.violations] == [(4, 1)]
    assert "FAIL" in str(report)

    with pytest.raises(NotThreshold) as exc:
        extract_thresholds(policy)
    assert exc.value.report.violations


def test_check_thresholds_report():
    """A clean policy reports PASS with one cutoff per eligible class"""
    report = check_thresholds(dp_solve(ProblemSpec(Variant.BEST_OR_WORST, PayoffRegime.binary(), 20)))
    assert report.ok
    assert report.thresholds == {"best": 10, "worst": 10}
    assert report.strategy == Strategy.one(10)
    assert report.to_dict()["strategy"] == "r=10"
    assert "PASS" in str(report)


def test_policy_to_csv():
    """One header plus one row per state, exact values as fractions"""
    policy = dp_solve(ProblemSpec(Variant.CLASSIC, PayoffRegime.binary(), 6))
    out = io.StringIO()
    text = policy_to_csv(policy, out)
    assert out.getvalue() == text
    lines = text.strip().split("\n")
    assert lines[0] == "k,j,decision,value,accept_value,reject_value"
    assert len(lines) == 6 * 7 // 2 + 1
    assert lines[1].startswith("1,1,reject,")
    assert any(line.startswith("6,1,accept,1,1,0") for line in lines)


if __name__ == "__main__":
    pytest.main([__file__])
