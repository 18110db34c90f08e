"""Independent ground truth for the evaluators.

Two oracles live here:

* ``enumerate_permutations`` averages a rule over all n! interview orders;
* ``dp_solve`` runs backward induction over every relative-rank state
  (k, j) without assuming that the optimal rule has cutoff form.
  ``extract_thresholds`` then checks whether it does.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from typing import Any, Dict, Iterator, List, Optional, TextIO, Tuple, Union

import numpy as np

from stoprule.config import Config, resolve
from stoprule.error import DomainError, NotThreshold, SizeLimit
from stoprule.model import (
    EvalResult,
    Method,
    PayoffKind,
    ProblemSpec,
    Strategy,
    Variant,
    validate,
    validate_spec,
)
from stoprule.rules import first_acceptance

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]

FLOAT_SLACK = 1e-12


@dataclass(frozen=True)
class RankState:
    """Interview k showing a candidate of relative rank j among the first k."""

    k: int
    j: int


def overall_rank_prob(n: int, k: int, j: int, i: int) -> Fraction:
    """P(overall rank i | relative rank j at interview k).

    C(i-1, j-1) * C(n-i, k-j) / C(n, k); zero outside j <= i <= n-k+j.

    Raises:
        DomainError: unless 1 <= j <= k <= n and 1 <= i <= n.
    """
    if not (1 <= j <= k <= n and 1 <= i <= n):
        raise DomainError(f"need 1 <= j <= k <= n and 1 <= i <= n, got n={n}, k={k}, j={j}, i={i}")
    return Fraction(math.comb(i - 1, j - 1) * math.comb(n - i, k - j), math.comb(n, k))


def _rank_prob(n: int, k: int, j: int, i: int, exact: bool) -> Scalar:
    if exact:
        return overall_rank_prob(n, k, j, i)
    return math.comb(i - 1, j - 1) * math.comb(n - i, k - j) / math.comb(n, k)


@dataclass
class Policy:
    """Solved decision problem over all states (k, j), 1 <= j <= k <= n.

    ``accept[k]`` maps the relative ranks with a non-zero payoff to their
    acceptance value; every other rank at interview k accepts for 0.
    ``reject[k]`` is the expected payoff of rejecting at interview k and
    playing optimally afterwards, with ``reject[n] = 0``; ``reject[0]`` is
    the optimal expected payoff.
    """

    spec: ProblemSpec
    exact: bool
    accept: List[Dict[int, Scalar]]
    reject: List[Scalar]

    @property
    def n(self) -> int:
        return self.spec.n

    def accept_value(self, k: int, j: int) -> Scalar:
        if not 1 <= j <= k <= self.n:
            raise DomainError(f"no state (k={k}, j={j}) for n={self.n}")
        return self.accept[k].get(j, Fraction(0) if self.exact else 0.0)

    def reject_value(self, k: int) -> Scalar:
        return self.reject[k]

    def value(self, k: int, j: int) -> Scalar:
        return max(self.accept_value(k, j), self.reject[k])

    def decision(self, k: int, j: int) -> bool:
        """True to accept. Ties reject."""
        acc, rej = self.accept_value(k, j), self.reject[k]
        if self.exact:
            return acc > rej
        return acc > rej + FLOAT_SLACK

    def states(self) -> Iterator[RankState]:
        for k in range(1, self.n + 1):
            for j in range(1, k + 1):
                yield RankState(k, j)

    @property
    def root(self) -> EvalResult:
        if self.exact:
            return EvalResult.from_exact(self.reject[0], Method.DP)
        return EvalResult.from_float(self.reject[0], Method.DP)


def dp_solve(spec: ProblemSpec, config: Config | None = None) -> Policy:
    """Backward induction from interview n down to 1.

    Exact rationals up to ``Config.dp_exact_limit``, floats above.

    Raises:
        SizeLimit: n above ``Config.dp_size_limit``.
    """
    config = resolve(config)
    validate_spec(spec)
    n = spec.n
    if n > config.dp_size_limit:
        raise SizeLimit(n, config.dp_size_limit, "dp_solve")
    exact = n <= config.dp_exact_limit
    zero: Scalar = Fraction(0) if exact else 0.0
    weights = spec.target_weights()
    logger.debug("dp_solve starting", extra={"spec": str(spec), "exact": exact})

    accept: List[Dict[int, Scalar]] = [{} for _ in range(n + 1)]
    reject: List[Scalar] = [zero] * (n + 1)
    for k in range(n, 0, -1):
        gain = spec.payoff.multiplier(k, n)
        if not exact:
            gain = float(gain)
        row: Dict[int, Scalar] = {}
        for i, w in weights.items():
            weight = w if exact else float(w)
            # relative ranks that can still end at overall rank i
            for j in range(max(1, i - (n - k)), min(k, i) + 1):
                row[j] = row.get(j, zero) + weight * _rank_prob(n, k, j, i, exact)
        for j in row:
            row[j] *= gain
        accept[k] = row
        cont = reject[k]
        total = sum((max(acc, cont) for acc in row.values()), zero) + (k - len(row)) * cont
        reject[k - 1] = total / k
    policy = Policy(spec, exact, accept, reject)
    logger.info(
        "dp_solve done",
        extra={"spec": str(spec), "exact": exact, "root": float(reject[0])},
    )
    return policy


@lru_cache(maxsize=2)
def _all_orders(n: int) -> np.ndarray:
    return np.array(list(permutations(range(1, n + 1))), dtype=np.int16).reshape(-1, n)


def enumerate_permutations(
    spec: ProblemSpec, strat: Strategy, config: Config | None = None
) -> EvalResult:
    """Exact average payoff of ``strat`` over all n! interview orders.

    Raises:
        SizeLimit: n above ``Config.enumeration_limit``.
    """
    config = resolve(config)
    validate(spec, strat)
    n = spec.n
    if n > config.enumeration_limit:
        raise SizeLimit(n, config.enumeration_limit, "enumerate_permutations")
    orders = _all_orders(n)
    interview, rank = first_acceptance(spec, strat, orders)
    cells, counts = np.unique(interview.astype(np.int64) * (n + 1) + rank, return_counts=True)
    weights = spec.target_weights()
    total = Fraction(0)
    for cell, count in zip(cells.tolist(), counts.tolist()):
        k, i = divmod(cell, n + 1)
        if k and i in weights:
            total += count * weights[i] * spec.payoff.multiplier(k, n)
    return EvalResult.from_exact(total / math.factorial(n), Method.ENUMERATION)


# -- threshold structure -------------------------------------------------------


def _class_rank(name: str, k: int) -> Optional[int]:
    """Relative rank of class ``name`` at interview k, if the class exists there."""
    if name == "best":
        return 1
    if name == "worst":
        return k
    return 2 if k >= 2 else None


def _eligible_classes(spec: ProblemSpec) -> Tuple[str, ...]:
    if spec.variant is Variant.CLASSIC:
        return ("best",)
    if spec.variant is Variant.BEST_OR_WORST:
        return ("best", "worst")
    if spec.payoff.kind is PayoffKind.COST:
        return ("best", "second")
    return ("second",)


@dataclass(frozen=True)
class Violation:
    k: int
    j: int
    accept_value: float
    reject_value: float
    reason: str

    def to_dict(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "j": self.j,
            "accept_value": self.accept_value,
            "reject_value": self.reject_value,
            "reason": self.reason,
        }


@dataclass
class ThresholdReport:
    """Outcome of checking a policy for cutoff form.

    ``thresholds`` maps each eligible class to the last interview before it
    is first accepted (n-1 if never). ``violations`` lists the states that
    contradict the cutoff form; ``strategy`` is set when there are none.
    """

    spec: ProblemSpec
    thresholds: Dict[str, int] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)
    strategy: Optional[Strategy] = None

    @property
    def ok(self) -> bool:
        return self.strategy is not None and not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spec": str(self.spec),
            "thresholds": dict(self.thresholds),
            "strategy": None if self.strategy is None else str(self.strategy),
            "violations": [v.to_dict() for v in self.violations],
        }

    def __str__(self) -> str:
        lines = [f"threshold check for {self.spec}: {'PASS' if self.ok else 'FAIL'}"]
        for name, t in self.thresholds.items():
            lines.append(f"  {name}: r={t}")
        for v in self.violations:
            lines.append(
                f"  k={v.k} j={v.j} accept={v.accept_value:.6g} reject={v.reject_value:.6g}: {v.reason}"
            )
        return "\n".join(lines)


def check_thresholds(policy: Policy) -> ThresholdReport:
    """Inspect the accept region of ``policy`` without raising.

    Ties (accept value equal to reject value) are consistent with either
    decision, so only strict contradictions count as violations.
    """
    spec, n = policy.spec, policy.n
    report = ThresholdReport(spec)
    slack = 0 if policy.exact else FLOAT_SLACK
    classes = _eligible_classes(spec)

    for name in classes:
        first = next(
            (k for k in range(1, n + 1) if _class_rank(name, k) and policy.decision(k, _class_rank(name, k))),
            n,
        )
        report.thresholds[name] = first - 1
        for k in range(first + 1, n + 1):
            j = _class_rank(name, k)
            if j is None:
                continue
            acc, rej = policy.accept_value(k, j), policy.reject[k]
            if acc < rej - slack:
                report.violations.append(
                    Violation(k, j, float(acc), float(rej), f"{name} rejected after its cutoff")
                )

    for state in policy.states():
        if any(_class_rank(name, state.k) == state.j for name in classes):
            continue
        if policy.decision(state.k, state.j):
            report.violations.append(
                Violation(
                    state.k,
                    state.j,
                    float(policy.accept_value(state.k, state.j)),
                    float(policy.reject[state.k]),
                    "accepted outside the eligible classes",
                )
            )

    if report.violations:
        return report
    t = report.thresholds
    if spec.variant is Variant.CLASSIC:
        report.strategy = Strategy.one(t["best"])
    elif spec.payoff.kind is PayoffKind.UNBALANCED:
        if t["best"] <= t["worst"]:
            report.strategy = Strategy.two(t["best"], t["worst"])
    elif spec.variant is Variant.BEST_OR_WORST:
        if t["best"] == t["worst"]:
            report.strategy = Strategy.one(t["best"])
    elif spec.payoff.kind is PayoffKind.COST:
        if t["best"] <= t["second"]:
            report.strategy = Strategy.two(t["best"], t["second"])
    else:
        report.strategy = Strategy.one(t["second"])
    return report


def extract_thresholds(policy: Policy) -> Strategy:
    """Cutoff rule realised by ``policy``.

    Raises:
        NotThreshold: the accept region is not of cutoff form; the error
            carries the ``ThresholdReport``.
    """
    report = check_thresholds(policy)
    if not report.ok:
        logger.warning("policy is not of threshold form", extra={"report": report.to_dict()})
        raise NotThreshold(f"optimal policy for {policy.spec} is not of threshold form", report)
    return report.strategy


def recurrence_check_T(n: int) -> Tuple[bool, Optional[int]]:
    """Check T_n(r) = (1/(r+1)) C(r+1,2)/C(n,2) + (r/(r+1)) T_n(r+1), T_n(n-1) = 1/n.

    Compares every T_n(r) with r(n-r)/(n(n-1)) exactly.

    Returns:
        (True, None) on success, else (False, first failing r).
    """
    if n < 2:
        raise DomainError(f"recurrence needs n >= 2, got {n}")
    pairs = Fraction(1, math.comb(n, 2))
    t = Fraction(1, n)
    for r in range(n - 1, 0, -1):
        if r < n - 1:
            t = Fraction(1, r + 1) * math.comb(r + 1, 2) * pairs + Fraction(r, r + 1) * t
        if t != Fraction(r * (n - r), n * (n - 1)):
            return False, r
    return True, None


def policy_to_csv(policy: Policy, out: Optional[TextIO] = None) -> str:
    """Write ``k,j,decision,value,accept_value,reject_value`` rows for every state.

    Exact values are written as ``num/den``. Returns the CSV text; also
    writes it to ``out`` when given.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["k", "j", "decision", "value", "accept_value", "reject_value"])
    for state in policy.states():
        writer.writerow(
            [
                state.k,
                state.j,
                "accept" if policy.decision(state.k, state.j) else "reject",
                policy.value(state.k, state.j),
                policy.accept_value(state.k, state.j),
                policy.reject[state.k],
            ]
        )
    text = buffer.getvalue()
    if out is not None:
        out.write(text)
    return text
