"""Monte Carlo estimates of the expected payoff of a cutoff rule.

Samples are cut into fixed blocks of ``Config.mc_block_size`` orders, fewer
for large n so one block never holds more than ``Config.mc_cell_budget``
ranks. Block b draws its orders from a Philox stream seeded by
``SeedSequence(seed, spawn_key=(b,))``, so a report depends only on (seed,
samples, block rows) and never on how blocks are spread over worker
processes. The block rows are part of the generator identifier.
"""

from __future__ import annotations

import bisect
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from stoprule.config import Config, resolve
from stoprule.error import InvalidParameters
from stoprule.model import ProblemSpec, Strategy, StrategyKind, Variant, validate
from stoprule.rules import first_acceptance, payoff_tables

logger = logging.getLogger(__name__)

Z_95 = 1.96


def generator_id(block_size: int) -> str:
    return f"philox4x64/seedseq-spawn/fisher-yates/block={block_size}"


def block_rows(n: int, config: Config) -> int:
    """Orders per block: ``mc_block_size``, cut so a block holds at most ``mc_cell_budget`` ranks."""
    return max(1, min(config.mc_block_size, config.mc_cell_budget // n))


@dataclass(frozen=True)
class SimReport:
    """Result of ``estimate``.

    ``std_error`` is the sample standard deviation over sqrt(samples); with a
    single sample it is 0 and ``std_error_defined`` is False.
    """

    estimate: float
    samples: int
    std_error: float
    ci95_low: float
    ci95_high: float
    seed: int
    generator: str
    std_error_defined: bool = True

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SimReport":
        return cls(
            estimate=float(data["estimate"]),
            samples=int(data["samples"]),
            std_error=float(data["std_error"]),
            ci95_low=float(data["ci95_low"]),
            ci95_high=float(data["ci95_high"]),
            seed=int(data["seed"]),
            generator=str(data["generator"]),
            std_error_defined=bool(data.get("std_error_defined", True)),
        )


def run_strategy(order: Sequence[int], spec: ProblemSpec, strat: Strategy) -> float:
    """Realised payoff of ``strat`` on one interview order.

    ``order`` lists overall ranks (1 = best) in interview order. Decisions use
    only the relative ranks seen so far.

    Raises:
        InvalidParameters: ``order`` is not a permutation of 1..n.
    """
    validate(spec, strat)
    n = spec.n
    if sorted(order) != list(range(1, n + 1)):
        raise InvalidParameters(f"order must be a permutation of 1..{n}", invariant="order is a permutation")
    weights = spec.target_weights()
    seen: List[int] = []
    for k, rank in enumerate(order, start=1):
        j = bisect.bisect_left(seen, rank) + 1
        bisect.insort(seen, rank)
        if _accepts(spec, strat, k, j):
            return float(weights.get(rank, 0) * spec.payoff.multiplier(k, n))
    return 0.0


def _accepts(spec: ProblemSpec, strat: Strategy, k: int, j: int) -> bool:
    if k <= strat.r:
        return False
    best = j == 1
    if spec.variant is Variant.CLASSIC:
        wide = best
    elif spec.variant is Variant.BEST_OR_WORST:
        wide = best or j == k
    else:
        wide = best or j == 2
    if strat.kind is StrategyKind.ONE_THRESHOLD:
        return j == 2 if spec.variant is Variant.POSTDOC else wide
    return best if k <= strat.s else wide


def _run_block(spec: ProblemSpec, strat: Strategy, seed: int, block: int, size: int) -> Tuple[float, float]:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))
    base = np.tile(np.arange(1, spec.n + 1, dtype=np.int32), (size, 1))
    orders = rng.permuted(base, axis=1)
    interview, rank = first_acceptance(spec, strat, orders)
    weight, multiplier = payoff_tables(spec)
    payoffs = weight[rank] * multiplier[interview]
    return math.fsum(payoffs), math.fsum(payoffs * payoffs)


def _blocks(samples: int, block_size: int) -> List[Tuple[int, int]]:
    return [
        (b, min(block_size, samples - b * block_size))
        for b in range(math.ceil(samples / block_size))
    ]


def estimate(
    spec: ProblemSpec,
    strat: Strategy,
    samples: int,
    seed: int,
    config: Config | None = None,
) -> SimReport:
    """Mean payoff over ``samples`` uniformly random orders.

    Blocks run in ``Config.threads`` worker processes when more than one
    is configured; per-block sums are combined in block order.

    Raises:
        InvalidParameters: samples < 1 or seed outside [0, 2**64).
    """
    config = resolve(config)
    validate(spec, strat)
    if samples < 1:
        raise InvalidParameters(f"samples must be >= 1, got {samples}", invariant="samples >= 1")
    if not 0 <= seed < 2**64:
        raise InvalidParameters(f"seed must be a 64-bit unsigned integer, got {seed}", invariant="0 <= seed < 2^64")

    rows = block_rows(spec.n, config)
    blocks = _blocks(samples, rows)
    logger.debug(
        "monte carlo starting",
        extra={
            "spec": str(spec),
            "strategy": str(strat),
            "samples": samples,
            "blocks": len(blocks),
            "rows": rows,
        },
    )
    if config.threads > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            futures = [pool.submit(_run_block, spec, strat, seed, b, size) for b, size in blocks]
            sums = [future.result() for future in futures]
    else:
        sums = [_run_block(spec, strat, seed, b, size) for b, size in blocks]

    total = math.fsum(s for s, _ in sums)
    total_sq = math.fsum(q for _, q in sums)
    mean = total / samples
    if samples > 1:
        variance = max(total_sq - samples * mean * mean, 0.0) / (samples - 1)
        std_error = math.sqrt(variance / samples)
    else:
        std_error = 0.0
    report = SimReport(
        estimate=mean,
        samples=samples,
        std_error=std_error,
        ci95_low=mean - Z_95 * std_error,
        ci95_high=mean + Z_95 * std_error,
        seed=seed,
        generator=generator_id(rows),
        std_error_defined=samples > 1,
    )
    logger.info("monte carlo done", extra={"estimate": mean, "std_error": std_error, "samples": samples})
    return report
