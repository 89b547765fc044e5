import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptive_pilot.errors import ConfigError, InsufficientBits, LayoutInvalid
from adaptive_pilot.grid import (
    Arrangement,
    LinkConfig,
    OfdmGrid,
    PilotLayout,
    Role,
    build_grid,
    data_rate_fraction,
)


def bits_for(n, seed=0):
    return np.random.default_rng(seed).integers(0, 2, size=n)


def test_block_period_one_is_all_pilot(config):
    grid, left = build_grid(config, PilotLayout.block(1), 4, np.zeros(0, dtype=int))
    assert np.all(grid.roles == Role.PILOT)
    assert data_rate_fraction(grid) == 0.0
    assert left.size == 0


def test_block_period_four_roles(config):
    grid, _ = build_grid(config, PilotLayout.block(4), 8, bits_for(6 * 64 * 2))
    pilot_rows = [t for t in range(8) if np.all(grid.roles[t] == Role.PILOT)]
    data_rows = [t for t in range(8) if np.all(grid.roles[t] == Role.DATA)]
    assert pilot_rows == [0, 4]
    assert data_rows == [1, 2, 3, 5, 6, 7]
    assert data_rate_fraction(grid) == 0.75


def test_comb_spacing_four():
    cfg = LinkConfig(num_subcarriers=16, cp_length=4)
    grid, _ = build_grid(cfg, PilotLayout.comb(4), 3, bits_for(3 * 12 * 2))
    for t in range(3):
        assert list(np.flatnonzero(grid.roles[t] == Role.PILOT)) == [0, 4, 8, 12]


def test_all_data_grid_rate_one():
    grid = OfdmGrid(np.ones((2, 8)), np.zeros((2, 8), dtype=int))
    assert data_rate_fraction(grid) == 1.0


def test_leftover_bits_reported(config):
    bits = bits_for(3 * 64 * 2 + 5)
    _, left = build_grid(config, PilotLayout.block(4), 4, bits)
    np.testing.assert_array_equal(left, bits[-5:])


def test_insufficient_bits(config):
    with pytest.raises(InsufficientBits):
        build_grid(config, PilotLayout.block(2), 4, bits_for(10))


@pytest.mark.parametrize(
    "layout",
    [
        PilotLayout(Arrangement.BLOCK, 4, 2),
        PilotLayout(Arrangement.COMB, 2, 4),
        PilotLayout(Arrangement.BLOCK, 0, 1),
    ],
)
def test_invalid_layouts(config, layout):
    with pytest.raises(LayoutInvalid):
        build_grid(config, layout, 4, bits_for(10_000))


@given(period=st.integers(1, 16), reps=st.integers(1, 6))
def test_block_rate_is_one_minus_inverse_period(period, reps):
    cfg = LinkConfig(num_subcarriers=8, cp_length=2)
    m = period * reps
    grid, _ = build_grid(cfg, PilotLayout.block(period), m, np.zeros(m * 8 * 2, dtype=int))
    assert data_rate_fraction(grid) == pytest.approx(1 - 1 / period, abs=1e-15)


def test_rebuild_is_identical_and_pilots_unit(config):
    bits = bits_for(7 * 64 * 2, seed=3)
    g1, _ = build_grid(config, PilotLayout.block(4), 8, bits)
    g2, _ = build_grid(config, PilotLayout.block(4), 8, bits)
    assert g1.symbols.tobytes() == g2.symbols.tobytes()
    np.testing.assert_allclose(np.abs(g1.symbols[g1.roles == Role.PILOT]), 1.0, atol=1e-15)


def test_grid_is_immutable(config):
    grid, _ = build_grid(config, PilotLayout.block(1), 2, np.zeros(0, dtype=int))
    with pytest.raises(ValueError):
        grid.symbols[0, 0] = 0


def test_shape_mismatch_rejected():
    with pytest.raises(LayoutInvalid):
        OfdmGrid(np.ones((2, 8)), np.zeros((2, 4), dtype=int))


def test_dump_csv(tmp_path):
    cfg = LinkConfig(num_subcarriers=8, cp_length=2)
    grid, _ = build_grid(cfg, PilotLayout.block(2), 2, bits_for(16))
    path = tmp_path / "grid.csv"
    grid.dump_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,k,role,re,im"
    assert len(lines) == 1 + 16
    assert lines[1].startswith("0,0,PILOT,")
    assert lines[9].startswith("1,0,DATA,")


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(num_subcarriers=48),
        dict(num_subcarriers=4, cp_length=1),
        dict(ber_threshold=0.5),
        dict(ber_threshold=0.0),
        dict(base_pilot_period=0),
        dict(modulation_order=3),
        dict(pilots_per_sounding=10),
    ],
)
def test_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        LinkConfig(**kwargs)


def test_config_derived_fields():
    cfg = LinkConfig(pilot_subcarrier_spacing=4)
    assert cfg.pilots_per_sounding == 16
    assert cfg.symbol_time == pytest.approx(1 / (64 * 15e3))
    assert cfg.samples_per_symbol == 72
