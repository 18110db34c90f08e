"""Command-line interface for stoprule.

Commands:
    evaluate   expected payoff of one cutoff rule
    optimize   best cutoff rule by argmax scan
    simulate   Monte Carlo estimate of one cutoff rule
    oracle     backward-induction optimum and threshold-structure check
    table      asymptotic and empirical cutoffs/payoffs for every variant

Examples:
    stoprule evaluate --variant bw --payoff binary --n 5 --r 2
    stoprule optimize --variant bw --payoff unbalanced --n 500 --m 1 --M 1
    stoprule simulate --variant classic --payoff binary --n 10 --r 3 --samples 100000 --seed 7
    stoprule oracle --variant postdoc --payoff cost --n 60 --export-policy policy.csv
    stoprule table --n 10000 --format md

CSV columns:
    evaluate   variant,payoff,n,strategy,value,exact,method
    optimize   variant,payoff,n,strategy,value,exact,method,scanned
    simulate   variant,payoff,n,strategy,estimate,std_error,ci95_low,ci95_high,samples,seed,generator
    oracle     variant,payoff,n,value,exact,strategy,check
    table      payoff,variant,acv,amp,acv_empirical,amp_empirical,n

Exit codes: 0 success, 1 other errors, 2 invalid input, 3 optimal policy not
of threshold form.
"""

from __future__ import annotations

import argparse
import csv
import json as json_lib
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from stoprule import asymptotics, exact, montecarlo, oracle
from stoprule.config import Config, ConfigBuilder
from stoprule.error import NotThreshold, StopRuleError, ValidationError
from stoprule.model import EvalResult, PayoffKind, PayoffRegime, ProblemSpec, Strategy, Variant
from stoprule.telemetry import init_logging

logger = logging.getLogger(__name__)

SCHEMA = "v1"
EXIT_ERROR = 1
EXIT_VALIDATION = 2
EXIT_NOT_THRESHOLD = 3


def fmt(value: float) -> str:
    """Six significant digits."""
    return f"{value:.6g}"


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _spec(args: argparse.Namespace) -> ProblemSpec:
    payoff = PayoffRegime(PayoffKind(args.payoff), args.m, args.M)
    return ProblemSpec(Variant(args.variant), payoff, args.n)


def _strategy(args: argparse.Namespace, spec: ProblemSpec) -> Strategy:
    if args.s is not None or spec.two_threshold:
        return Strategy.two(args.r, args.s)
    return Strategy.one(args.r)


def _spec_fields(spec: ProblemSpec) -> Dict[str, Any]:
    fields: Dict[str, Any] = {
        "variant": spec.variant.value,
        "payoff": spec.payoff.kind.value,
        "n": spec.n,
    }
    if spec.payoff.kind is PayoffKind.UNBALANCED:
        fields["m"] = str(spec.payoff.m)
        fields["M"] = str(spec.payoff.M)
    return fields


def _value_fields(result: EvalResult) -> Dict[str, Any]:
    return {
        "value": float(fmt(result.value)),
        "exact": None if result.exact is None else f"{result.exact_num}/{result.exact_den}",
        "method": result.method.value,
    }


# -- output --------------------------------------------------------------------


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return fmt(value)
    return str(value)


def emit(fmt_name: str, document: Dict[str, Any], rows: List[Dict[str, Any]], columns: Sequence[str]) -> None:
    """Print ``document`` as JSON, or ``rows`` as CSV or a markdown table."""
    if fmt_name == "json":
        print(json_lib.dumps({"schema": SCHEMA, **document}, indent=2))
    elif fmt_name == "csv":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
    else:
        print("| " + " | ".join(columns) + " |")
        print("|" + "|".join("---" for _ in columns) + "|")
        for row in rows:
            print("| " + " | ".join(_cell(row.get(c)) for c in columns) + " |")


# -- commands ------------------------------------------------------------------


def cmd_evaluate(args: argparse.Namespace, config: Config) -> int:
    spec = _spec(args)
    strat = _strategy(args, spec)
    if args.method == "simulate":
        report = montecarlo.estimate(spec, strat, args.samples, args.seed, config)
        return _print_sim(args, spec, strat, report, "evaluate")
    if args.method == "enumerate":
        result = oracle.enumerate_permutations(spec, strat, config)
    else:
        result = exact.evaluate(spec, strat, config)
    row = {**_spec_fields(spec), "strategy": str(strat), **_value_fields(result)}
    document = {"command": "evaluate", "spec": _spec_fields(spec), "strategy": str(strat), **_value_fields(result)}
    emit(args.format, document, [row], ["variant", "payoff", "n", "strategy", "value", "exact", "method"])
    return 0


def cmd_optimize(args: argparse.Namespace, config: Config) -> int:
    spec = _spec(args)
    found = exact.argmax(spec, config, full_scan=args.full_scan)
    fields = {"strategy": str(found.best_strategy), **_value_fields(found.best_value), "scanned": found.scanned}
    emit(
        args.format,
        {"command": "optimize", "spec": _spec_fields(spec), **fields},
        [{**_spec_fields(spec), **fields}],
        ["variant", "payoff", "n", "strategy", "value", "exact", "method", "scanned"],
    )
    return 0


def _print_sim(
    args: argparse.Namespace,
    spec: ProblemSpec,
    strat: Strategy,
    report: montecarlo.SimReport,
    command: str,
) -> int:
    fields = report.to_dict()
    emit(
        args.format,
        {"command": command, "spec": _spec_fields(spec), "strategy": str(strat), **fields},
        [{**_spec_fields(spec), "strategy": str(strat), **fields}],
        [
            "variant", "payoff", "n", "strategy", "estimate", "std_error",
            "ci95_low", "ci95_high", "samples", "seed", "generator",
        ],
    )
    return 0


def cmd_simulate(args: argparse.Namespace, config: Config) -> int:
    spec = _spec(args)
    strat = _strategy(args, spec)
    report = montecarlo.estimate(spec, strat, args.samples, args.seed, config)
    return _print_sim(args, spec, strat, report, "simulate")


def cmd_oracle(args: argparse.Namespace, config: Config) -> int:
    spec = _spec(args)
    policy = oracle.dp_solve(spec, config)
    if args.export_policy:
        with open(args.export_policy, "w", newline="", encoding="utf-8") as handle:
            oracle.policy_to_csv(policy, handle)
        logger.info("policy exported", extra={"path": args.export_policy})
    report = oracle.check_thresholds(policy)
    fields = {
        **_value_fields(policy.root),
        "strategy": None if report.strategy is None else str(report.strategy),
        "thresholds": report.thresholds,
        "check": "PASS" if report.ok else "FAIL",
    }
    row = {**_spec_fields(spec), **fields}
    emit(
        args.format,
        {"command": "oracle", "spec": _spec_fields(spec), **fields},
        [row],
        ["variant", "payoff", "n", "value", "exact", "strategy", "check"],
    )
    if not report.ok:
        raise NotThreshold(f"optimal policy for {spec} is not of threshold form", report)
    return 0


@dataclass(frozen=True)
class TableRow:
    """One cell of the comparison table."""

    payoff: PayoffKind
    variant: Variant
    acv: Tuple[float, ...]
    amp: float
    acv_empirical: Tuple[float, ...]
    amp_empirical: float
    n: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "payoff": self.payoff.value,
            "variant": self.variant.value,
            "acv": [float(fmt(x)) for x in self.acv],
            "amp": float(fmt(self.amp)),
            "acv_empirical": [float(fmt(x)) for x in self.acv_empirical],
            "amp_empirical": float(fmt(self.amp_empirical)),
            "n": self.n,
        }

    def to_cells(self) -> Dict[str, Any]:
        return {
            "payoff": self.payoff.value,
            "variant": self.variant.value,
            "acv": ", ".join(fmt(x) for x in self.acv),
            "amp": fmt(self.amp),
            "acv_empirical": ", ".join(fmt(x) for x in self.acv_empirical),
            "amp_empirical": fmt(self.amp_empirical),
            "n": self.n,
        }


TABLE_PAYOFFS = (PayoffRegime.binary(), PayoffRegime.cost(), PayoffRegime.perquisite())
TABLE_VARIANTS = (Variant.CLASSIC, Variant.BEST_OR_WORST, Variant.POSTDOC)


def table_rows(n: int, config: Config | None = None) -> List[TableRow]:
    """Asymptotic cells next to argmax scans at ``n``, payoff-major order."""
    rows = []
    for payoff in TABLE_PAYOFFS:
        for variant in TABLE_VARIANTS:
            cell = asymptotics.asymptotic_cell(variant, payoff)
            found = exact.argmax(ProblemSpec(variant, payoff, n), config)
            rows.append(
                TableRow(
                    payoff=payoff.kind,
                    variant=variant,
                    acv=cell.acv,
                    amp=cell.amp,
                    acv_empirical=tuple(t / n for t in found.best_strategy.thresholds),
                    amp_empirical=found.best_value.value,
                    n=n,
                )
            )
    return rows


def cmd_table(args: argparse.Namespace, config: Config) -> int:
    rows = table_rows(args.n, config)
    emit(
        args.format,
        {"command": "table", "n": args.n, "rows": [row.to_dict() for row in rows]},
        [row.to_cells() for row in rows],
        ["payoff", "variant", "acv", "amp", "acv_empirical", "amp_empirical", "n"],
    )
    return 0


# -- parser --------------------------------------------------------------------


def _add_spec_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    parser.add_argument("--payoff", required=True, choices=[p.value for p in PayoffKind])
    parser.add_argument("--n", required=True, type=int, help="Number of candidates")
    parser.add_argument("--m", type=_rational, help="Payment for the worst candidate (unbalanced)")
    parser.add_argument("--M", type=_rational, help="Payment for the best candidate (unbalanced)")


def _add_strategy_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--r", required=True, type=int, help="Candidates rejected outright")
    parser.add_argument("--s", type=int, help="Second cutoff (two-threshold problems)")


def _add_sampling_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples (default: 100000)")
    parser.add_argument("--seed", type=int, default=0, help="64-bit seed (default: 0)")


def _add_format_argument(parser: argparse.ArgumentParser, default: str = "json") -> None:
    parser.add_argument(
        "--format",
        choices=["json", "csv", "md"],
        default=default,
        help=f"Output format (default: {default})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stoprule",
        description="Cutoff rules for the secretary problem and its variants",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (-vv for debug)")
    parser.add_argument("--log-json", action="store_true", help="Log JSON lines to stderr")
    parser.add_argument("--threads", type=int, help="Worker processes (overrides STOPRULE_THREADS)")
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate = commands.add_parser("evaluate", help="Expected payoff of one cutoff rule")
    _add_spec_arguments(evaluate)
    _add_strategy_arguments(evaluate)
    evaluate.add_argument(
        "--method",
        choices=["exact", "enumerate", "simulate"],
        default="exact",
        help="Closed form/summation, permutation enumeration (small n) or simulation",
    )
    _add_sampling_arguments(evaluate)
    _add_format_argument(evaluate)
    evaluate.set_defaults(handler=cmd_evaluate)

    optimize = commands.add_parser("optimize", help="Best cutoff rule by scan")
    _add_spec_arguments(optimize)
    optimize.add_argument("--full-scan", action="store_true", help="Force the full two-threshold grid")
    _add_format_argument(optimize)
    optimize.set_defaults(handler=cmd_optimize)

    simulate = commands.add_parser("simulate", help="Monte Carlo estimate of one cutoff rule")
    _add_spec_arguments(simulate)
    _add_strategy_arguments(simulate)
    _add_sampling_arguments(simulate)
    _add_format_argument(simulate)
    simulate.set_defaults(handler=cmd_simulate)

    oracle_cmd = commands.add_parser("oracle", help="Backward induction and threshold check")
    _add_spec_arguments(oracle_cmd)
    oracle_cmd.add_argument("--export-policy", metavar="PATH", help="Write the policy as CSV")
    _add_format_argument(oracle_cmd)
    oracle_cmd.set_defaults(handler=cmd_oracle)

    table = commands.add_parser("table", help="Asymptotic vs empirical cutoffs and payoffs")
    table.add_argument("--n", type=int, default=10_000, help="Candidates for the empirical columns (default: 10000)")
    _add_format_argument(table, default="md")
    table.set_defaults(handler=cmd_table)
    return parser


def _config(args: argparse.Namespace) -> Config:
    config = Config.from_env()
    if args.threads is not None:
        config = ConfigBuilder(config).with_threads(args.threads).build()
    return config


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: None, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    init_logging(level, json_output=args.log_json)
    handler: Callable[[argparse.Namespace, Config], int] = args.handler
    try:
        return handler(args, _config(args))
    except NotThreshold as e:
        print(f"Error: {e}", file=sys.stderr)
        if e.report is not None:
            print(str(e.report), file=sys.stderr)
        return EXIT_NOT_THRESHOLD
    except ValidationError as e:
        print(f"Error: {e} (violated: {e.invariant})", file=sys.stderr)
        return EXIT_VALIDATION
    except StopRuleError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
