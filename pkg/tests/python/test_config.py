"""Unit tests for Config, ConfigBuilder and environment overrides"""

import pytest

from stoprule.config import Config, ConfigBuilder, THREADS_ENV, resolve, default_config
from stoprule.error import InvalidParameters


def test_config_defaults():
    """Defaults match the documented policy"""
    config = Config()
    assert config.threads == 1
    assert config.exact_limit == 1000
    assert config.pair_exact_limit == 60
    assert config.full_scan_limit == 2000
    assert config.coarse_points == 1000
    assert config.dp_exact_limit == 300
    assert config.dp_size_limit == 5000
    assert config.enumeration_limit == 10
    assert config.mc_block_size == 8192
    assert config.mc_cell_budget == 1 << 22


def test_builder_sets_fields():
    """Fluent setters chain and build an immutable Config"""
    config = ConfigBuilder().with_threads(4).with_full_scan_limit(500).with_mc_block_size(256).build()
    assert config.threads == 4
    assert config.full_scan_limit == 500
    assert config.mc_block_size == 256
    with pytest.raises(AttributeError):
        config.threads = 2


def test_builder_starts_from_base():
    """A builder seeded with a config keeps its other fields"""
    base = ConfigBuilder().with_dp_exact_limit(10).build()
    config = ConfigBuilder(base).with_threads(3).build()
    assert config.dp_exact_limit == 10
    assert config.threads == 3


def test_builder_rejects_non_positive():
    """Every field must be a positive integer"""
    with pytest.raises(InvalidParameters) as exc:
        ConfigBuilder().with_threads(0).build()
    assert exc.value.invariant == "threads >= 1"


def test_builder_rejects_dp_limits_out_of_order():
    """dp_exact_limit cannot exceed dp_size_limit"""
    with pytest.raises(InvalidParameters):
        ConfigBuilder().with_dp_exact_limit(100).with_dp_size_limit(50).build()


def test_from_env_threads():
    """STOPRULE_THREADS overrides the worker count"""
    assert Config.from_env({THREADS_ENV: "8"}).threads == 8
    assert Config.from_env({}).threads == 1


def test_from_env_invalid_threads():
    """Non-numeric or non-positive thread counts are rejected"""
    with pytest.raises(InvalidParameters):
        Config.from_env({THREADS_ENV: "many"})
    with pytest.raises(InvalidParameters):
        Config.from_env({THREADS_ENV: "-1"})


def test_resolve():
    """None resolves to the cached process default"""
    custom = ConfigBuilder().with_threads(2).build()
    assert resolve(custom) is custom
    assert resolve(None) is default_config()


if __name__ == "__main__":
    pytest.main([__file__])
