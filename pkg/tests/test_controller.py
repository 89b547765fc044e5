from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adaptive_pilot.channel import ChannelProfile, realize_channel, true_frequency_response
from adaptive_pilot.controller import (
    BOUNDARY_SETS,
    Action,
    BoundarySet,
    PatternController,
    PatternSpec,
    ber_error,
    boundary_set,
    cross_correlation,
    higher_boundary,
    higher_boundary_factored,
    lower_boundary,
    lower_boundary_factored,
    select_pattern,
)
from adaptive_pilot.errors import ConfigError, IndexOutOfRange, LengthMismatch, ZeroEnergy

from helpers import crandn

finite_c = st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False)
nonzero_c = finite_c.filter(lambda c: abs(c) > 1e-3)
vectors = st.lists(finite_c, min_size=1, max_size=32).filter(lambda v: sum(abs(c) ** 2 for c in v) > 1e-6)


def brute_correlation(p1, p2):
    acc = 0j
    e1 = e2 = 0.0
    for a, b in zip(p1, p2):
        acc += complex(a) * complex(b).conjugate()
        e1 += abs(complex(a)) ** 2
        e2 += abs(complex(b)) ** 2
    return abs(acc) / (e1 * e2) ** 0.5


# --- boundaries -------------------------------------------------------------

def test_lower_boundaries_values():
    assert [lower_boundary(i) for i in range(4)] == pytest.approx([0.0, 0.7, 0.8, 0.9], abs=1e-12)


def test_higher_boundaries_values():
    assert [higher_boundary(i) for i in range(4)] == pytest.approx([0.7, 0.8, 0.9, 1.0], abs=1e-12)


def test_factored_forms_agree_exactly():
    for i in range(4):
        assert lower_boundary_factored(i) == Fraction(1, 10) * i**3 - Fraction(6, 10) * i**2 + Fraction(12, 10) * i
        assert higher_boundary_factored(i) == Fraction(1, 10) * i + Fraction(7, 10)
        assert abs(lower_boundary(i) - float(lower_boundary_factored(i))) <= 1e-12
        assert abs(higher_boundary(i) - float(higher_boundary_factored(i))) <= 1e-12


def test_contiguity():
    for i in range(3):
        assert higher_boundary(i) == pytest.approx(lower_boundary(i + 1), abs=1e-12)


@pytest.mark.parametrize("i", [-1, 4])
def test_boundary_index_range(i):
    with pytest.raises(IndexOutOfRange):
        lower_boundary(i)
    with pytest.raises(IndexOutOfRange):
        higher_boundary(i)


def test_boundary_sets_table():
    assert BOUNDARY_SETS[4] == BoundarySet.polynomial()
    assert BOUNDARY_SETS[4].lower == (0.0, 0.7, 0.8, 0.9)
    assert BOUNDARY_SETS[1].lower == (0.0, 0.25, 0.5, 0.75)
    assert BOUNDARY_SETS[1].upper == (0.25, 0.5, 0.75, 1.0)
    assert BOUNDARY_SETS[2].lower == (0.0, 0.5, 0.7, 0.9)
    assert BOUNDARY_SETS[3].lower == (0.0, 0.6, 0.7, 0.9)
    assert BOUNDARY_SETS[5].lower == (0.0, 0.9, 0.95, 0.975)
    with pytest.raises(ConfigError):
        boundary_set(6)


def test_boundary_set_rejects_gaps():
    with pytest.raises(ConfigError):
        BoundarySet((0.0, 0.9, 0.95, 0.975), (0.9, 0.95, 0.97, 1.0))
    with pytest.raises(ConfigError):
        BoundarySet((0.1, 0.7, 0.8, 0.9), (0.7, 0.8, 0.9, 1.0))


# --- pattern selection ------------------------------------------------------

@pytest.mark.parametrize(
    "r, number, period",
    [(0.5, 1, 1), (0.0, 1, 1), (0.7, 2, 2), (0.75, 2, 2), (0.8, 3, 4), (0.85, 3, 4), (0.9, 4, 8), (1.0, 4, 8)],
)
def test_select_pattern_table(r, number, period):
    spec = select_pattern(r, BoundarySet.polynomial())
    assert spec.number == number and spec.period == period


def test_select_pattern_scales_period_with_n():
    assert select_pattern(0.85, BoundarySet.polynomial(), n=3, pilots=64) == PatternSpec(2, 12, 64)


def test_select_pattern_rejects_out_of_range():
    with pytest.raises(ValueError):
        select_pattern(1.01, BoundarySet.polynomial())


@pytest.mark.parametrize("set_id", sorted(BOUNDARY_SETS))
def test_partition_exactly_one_pattern(set_id):
    bs = BOUNDARY_SETS[set_id]
    grid = np.r_[np.linspace(0, 1, 10_001), bs.lower, bs.upper]
    for r in grid:
        hits = [i for i in range(4) if bs.lower[i] <= r < bs.upper[i] or (i == 3 and r == 1.0)]
        assert len(hits) == 1
        assert select_pattern(float(r), bs).index == hits[0]


@given(a=st.floats(0, 1), b=st.floats(0, 1))
def test_select_pattern_monotone(a, b):
    lo, hi = sorted((a, b))
    bs = BoundarySet.polynomial()
    assert select_pattern(hi, bs).index >= select_pattern(lo, bs).index


def test_period_formula_and_overhead_decreases():
    for n in (1, 2, 5):
        overheads = []
        for i in range(4):
            spec = PatternSpec.for_index(i, n, 64)
            assert spec.period == 2**i * n
            overheads.append(1 / spec.period)
        assert all(b < a for a, b in zip(overheads, overheads[1:]))
    with pytest.raises(IndexOutOfRange):
        PatternSpec.for_index(4)


# --- cross-correlation ------------------------------------------------------

def test_correlation_examples(rng):
    p = crandn(rng, 16)
    assert cross_correlation(p, p) == pytest.approx(1.0, abs=1e-12)
    assert cross_correlation([1, 0], [0, 1]) == 0.0
    assert cross_correlation(p, (0.3 - 4j) * p) == pytest.approx(1.0, abs=1e-12)


def test_correlation_matches_brute_force(rng):
    for _ in range(1000):
        m = int(rng.integers(1, 65))
        a, b = crandn(rng, m), crandn(rng, m)
        assert cross_correlation(a, b) == pytest.approx(brute_correlation(a, b), abs=1e-12)


@given(v=vectors, c=nonzero_c, seed=st.integers(0, 2**16))
def test_correlation_symmetric_and_scale_invariant(v, c, seed):
    a = np.array(v)
    b = crandn(np.random.default_rng(seed), a.size)
    r = cross_correlation(a, b)
    assert 0.0 <= r <= 1.0
    assert cross_correlation(b, a) == pytest.approx(r, abs=1e-9)
    assert cross_correlation(c * a, b) == pytest.approx(r, abs=1e-9)
    assert cross_correlation(a, c * b) == pytest.approx(r, abs=1e-9)


def test_correlation_errors():
    with pytest.raises(LengthMismatch):
        cross_correlation([1, 2], [1])
    with pytest.raises(LengthMismatch):
        cross_correlation([], [])
    with pytest.raises(ZeroEnergy):
        cross_correlation([0, 0], [1, 1])


def test_independent_channels_pattern_one_share():
    # For equal-power independent taps the normalized correlation of the two
    # responses satisfies R^2 ~ Beta(1, M - 1), so P(R < 0.7) = 1 - 0.51**(M - 1).
    for m in (4, 8):
        p = ChannelProfile(tuple(range(m)), (1 / m,) * m, 0.0)
        H = true_frequency_response(realize_channel(p, 1001, 7), p, 64)
        chosen = [select_pattern(cross_correlation(H[t], H[t + 1]), BoundarySet.polynomial()).index for t in range(1000)]
        share = np.mean(np.array(chosen) == 0)
        assert share == pytest.approx(1 - 0.51 ** (m - 1), abs=0.035)
    assert share >= 0.95  # the 8-tap case


# --- ber error and controller state machine ---------------------------------

def test_ber_error():
    assert ber_error(0.01, 0.01) == 0.0
    assert ber_error(0.02, 0.01) == pytest.approx(0.01)
    assert ber_error(0.0, 0.01) == -0.01


def test_first_sounding_keeps_pattern_one(rng):
    ctrl = PatternController()
    spec = ctrl.on_sounding(crandn(rng, 64))
    assert spec.number == 1 and ctrl.last_r is None
    assert ctrl.prev_pilot_obs is not None


def test_identical_observations_reach_pattern_four(rng):
    ctrl = PatternController(n=2, pilots_per_sounding=64)
    obs = crandn(rng, 64)
    ctrl.on_sounding(obs)
    spec = ctrl.on_sounding(obs.copy())
    assert spec == PatternSpec(3, 16, 64)
    assert ctrl.last_r == pytest.approx(1.0)
    assert ctrl.symbols_until_next_sounding == 15


def test_zero_errors_never_reset():
    ctrl = PatternController(ber_window=256)
    assert all(ctrl.on_data_symbol(0, 128) is Action.CONTINUE for _ in range(1000))
    assert ctrl.last_windowed_ber == 0.0


def test_window_ber_above_threshold_resets(rng):
    ctrl = PatternController(ber_threshold=0.01, ber_window=1000)
    ctrl.on_sounding(np.ones(8))
    ctrl.on_sounding(np.ones(8))
    assert ctrl.pattern.number == 4
    actions = [ctrl.on_data_symbol(2, 100) for _ in range(10)]
    assert actions[:9] == [Action.CONTINUE] * 9
    assert actions[9] is Action.RESET
    assert ctrl.pattern.number == 1
    assert ctrl.prev_pilot_obs is None
    assert ctrl.ber_window_bits == 0 and ctrl.ber_window_errors == 0
    # the next sounding behaves like the first one ever
    assert ctrl.on_sounding(np.ones(8)).number == 1
    assert ctrl.last_r is None


def test_window_slides():
    ctrl = PatternController(ber_threshold=0.4, ber_window=300)
    for e in (100, 0, 0, 0):
        ctrl.on_data_symbol(e, 100)
    # oldest symbol has slid out: 0 errors over the last 300 bits
    assert ctrl.ber_window_bits == 300
    assert ctrl.last_windowed_ber == 0.0
    assert ctrl.ber_window_bits >= ctrl.ber_window_errors


def test_data_symbol_needs_bits():
    with pytest.raises(ValueError):
        PatternController().on_data_symbol(0, 0)


def test_feedback_is_scalar(rng):
    ctrl = PatternController(ber_window=100)
    ctrl.on_sounding(crandn(rng, 64))
    ctrl.on_sounding(crandn(rng, 64))
    assert isinstance(ctrl.last_r, float)
    ctrl.on_data_symbol(1, 128)
    assert isinstance(ctrl.last_error, float)
