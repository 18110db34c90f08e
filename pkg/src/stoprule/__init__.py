"""stoprule: cutoff rules for the secretary problem and its variants.

Exact evaluation and argmax of threshold strategies, asymptotic constants,
a backward-induction oracle and a seeded Monte Carlo estimator for the
classic, best-or-worst and postdoc variants.
"""

from stoprule.config import Config, ConfigBuilder
from stoprule.error import (
    ConvergenceError,
    DomainError,
    InvalidCombination,
    InvalidParameters,
    InvalidThreshold,
    NotThreshold,
    NumericError,
    OracleError,
    SizeLimit,
    StopRuleError,
    ValidationError,
)
from stoprule.model import (
    EvalResult,
    Method,
    PayoffKind,
    PayoffRegime,
    ProblemSpec,
    Strategy,
    StrategyKind,
    Variant,
)
from stoprule.telemetry import init_logging

__version__ = "0.1.0"

__all__ = [
    "Config",
    "ConfigBuilder",
    "ConvergenceError",
    "DomainError",
    "EvalResult",
    "InvalidCombination",
    "InvalidParameters",
    "InvalidThreshold",
    "Method",
    "NotThreshold",
    "NumericError",
    "OracleError",
    "PayoffKind",
    "PayoffRegime",
    "ProblemSpec",
    "SizeLimit",
    "StopRuleError",
    "Strategy",
    "StrategyKind",
    "ValidationError",
    "Variant",
    "init_logging",
]
