"""Pytest configuration and fixtures for the stoprule tests

Shared fixtures: a small deterministic Config, the list of every
(variant, payoff) combination, a golden-file loader and an in-process CLI
runner.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path

import pytest

from stoprule.config import ConfigBuilder
from stoprule.model import PayoffRegime, ProblemSpec, Strategy, Variant

GOLDEN_DIR = Path(__file__).parent / "golden"

# Unbalanced payments exercised by the exhaustive tests
UNBALANCED_PAYMENTS = [(Fraction(0), Fraction(1)), (Fraction(1), Fraction(1)), (Fraction(1), Fraction(3))]


def all_regimes():
    """Every (variant, payoff regime) pair the library supports"""
    regimes = []
    for variant in Variant:
        for payoff in (PayoffRegime.binary(), PayoffRegime.cost(), PayoffRegime.perquisite()):
            regimes.append((variant, payoff))
    for m, M in UNBALANCED_PAYMENTS:
        regimes.append((Variant.BEST_OR_WORST, PayoffRegime.unbalanced(m, M)))
    return regimes


def feasible_strategies(spec: ProblemSpec):
    """All cutoff rules for ``spec``, r = 0 included"""
    n = spec.n
    if spec.two_threshold:
        return [Strategy.two(r, s) for s in range(n) for r in range(s + 1)]
    return [Strategy.one(r) for r in range(n)]


@pytest.fixture
def small_config():
    """Config with small limits so the float and coarse paths run at small n"""
    return (
        ConfigBuilder()
        .with_exact_limit(50)
        .with_scan_exact_limit(50)
        .with_pair_exact_limit(20)
        .with_full_scan_limit(100)
        .with_coarse_points(25)
        .with_dp_exact_limit(40)
        .with_mc_block_size(1024)
        .build()
    )


@pytest.fixture
def golden():
    """Load a golden JSON document by file name"""
    def load(name):
        with open(GOLDEN_DIR / name, encoding="utf-8") as handle:
            return json.load(handle)
    return load


@pytest.fixture
def run_cli(capsys):
    """Run the CLI in-process; returns (exit code, stdout, stderr)"""
    from stoprule.cli import main

    def run(*argv):
        code = main([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return run


@pytest.fixture(autouse=True)
def reset_package_logger():
    """Undo handlers installed by init_logging between tests"""
    yield
    root = logging.getLogger("stoprule")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.setLevel(logging.NOTSET)
    root.propagate = True


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running scans and simulations")
