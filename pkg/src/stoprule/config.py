"""Numeric policy configuration.

``Config`` is immutable; build custom instances with ``ConfigBuilder``::

    config = (
        ConfigBuilder()
        .with_threads(4)
        .with_full_scan_limit(500)
        .build()
    )

``Config.from_env()`` applies environment overrides (``STOPRULE_THREADS``) on
top of the defaults.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields, replace
from functools import lru_cache
from typing import Mapping, Optional

from stoprule.error import InvalidParameters

logger = logging.getLogger(__name__)

THREADS_ENV = "STOPRULE_THREADS"


@dataclass(frozen=True)
class Config:
    """Thresholds that decide between exact and floating-point paths."""

    threads: int = 1
    exact_limit: int = 1000
    scan_exact_limit: int = 1000
    pair_exact_limit: int = 60
    full_scan_limit: int = 2000
    coarse_points: int = 1000
    dp_exact_limit: int = 300
    dp_size_limit: int = 5000
    enumeration_limit: int = 10
    mc_block_size: int = 8192
    mc_cell_budget: int = 1 << 22

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Config":
        """Default configuration with environment overrides applied."""
        env = os.environ if environ is None else environ
        builder = ConfigBuilder()
        raw = env.get(THREADS_ENV)
        if raw:
            try:
                builder = builder.with_threads(int(raw))
            except ValueError:
                raise InvalidParameters(
                    f"{THREADS_ENV} must be a positive integer, got {raw!r}",
                    invariant="threads >= 1",
                ) from None
        return builder.build()


class ConfigBuilder:
    """Fluent builder for :class:`Config`; validation happens in ``build``."""

    def __init__(self, base: Optional[Config] = None):
        self._config = base or Config()

    def _set(self, **changes: int) -> "ConfigBuilder":
        self._config = replace(self._config, **changes)
        return self

    def with_threads(self, threads: int) -> "ConfigBuilder":
        return self._set(threads=threads)

    def with_exact_limit(self, limit: int) -> "ConfigBuilder":
        return self._set(exact_limit=limit)

    def with_scan_exact_limit(self, limit: int) -> "ConfigBuilder":
        return self._set(scan_exact_limit=limit)

    def with_pair_exact_limit(self, limit: int) -> "ConfigBuilder":
        return self._set(pair_exact_limit=limit)

    def with_full_scan_limit(self, limit: int) -> "ConfigBuilder":
        return self._set(full_scan_limit=limit)

    def with_coarse_points(self, points: int) -> "ConfigBuilder":
        return self._set(coarse_points=points)

    def with_dp_exact_limit(self, limit: int) -> "ConfigBuilder":
        return self._set(dp_exact_limit=limit)

    def with_dp_size_limit(self, limit: int) -> "ConfigBuilder":
        return self._set(dp_size_limit=limit)

    def with_enumeration_limit(self, limit: int) -> "ConfigBuilder":
        return self._set(enumeration_limit=limit)

    def with_mc_block_size(self, size: int) -> "ConfigBuilder":
        return self._set(mc_block_size=size)

    def with_mc_cell_budget(self, cells: int) -> "ConfigBuilder":
        return self._set(mc_cell_budget=cells)

    def build(self) -> Config:
        """Validate and return the configuration.

        Raises:
            InvalidParameters: If any field is not a positive integer, or the
                exact DP limit exceeds the DP size limit.
        """
        for field in fields(self._config):
            value = getattr(self._config, field.name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InvalidParameters(
                    f"config field {field.name} must be a positive integer, got {value!r}",
                    invariant=f"{field.name} >= 1",
                )
        if self._config.dp_exact_limit > self._config.dp_size_limit:
            raise InvalidParameters(
                "dp_exact_limit cannot exceed dp_size_limit",
                invariant="dp_exact_limit <= dp_size_limit",
            )
        return self._config


@lru_cache(maxsize=1)
def default_config() -> Config:
    """Process-wide configuration, read from the environment once."""
    config = Config.from_env()
    logger.debug("loaded configuration", extra={"config": config})
    return config


def resolve(config: Optional[Config]) -> Config:
    return default_config() if config is None else config
