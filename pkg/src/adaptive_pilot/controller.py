"""Adaptive pilot-pattern controller.

At every sounding the receiver correlates the received pilot tones with those
of the previous sounding.  The normalized correlation picks one of four
patterns, pattern ``i`` sounding every ``2**i * n`` symbols.  Between
soundings the measured BER over a sliding window is compared with a threshold;
once it exceeds the threshold the controller drops back to pattern 1 and
restarts the sounding sequence.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigError, IndexOutOfRange, LengthMismatch, ZeroEnergy

NUM_PATTERNS = 4


@dataclass(frozen=True)
class PatternSpec:
    index: int  # 0..3, shown to users as pattern 1..4
    period: int
    pilots_per_sounding: int

    @classmethod
    def for_index(cls, index: int, n: int = 1, pilots: int = 1) -> "PatternSpec":
        if not 0 <= index < NUM_PATTERNS:
            raise IndexOutOfRange(f"pattern index must lie in [0, 3], got {index}")
        return cls(index, (2**index) * n, pilots)

    @property
    def number(self) -> int:
        return self.index + 1


def _check_index(i: int) -> None:
    if not 0 <= i <= 3:
        raise IndexOutOfRange(f"boundary index must lie in [0, 3], got {i}")


def lower_boundary(i: int) -> float:
    _check_index(i)
    return 0.1 * i**3 - 0.6 * i**2 + 1.2 * i


def higher_boundary(i: int) -> float:
    _check_index(i)
    return 0.1 * i + 0.7


def lower_boundary_factored(i: int) -> Fraction:
    """Same lower bound in its nested-product form, evaluated exactly."""
    _check_index(i)
    return Fraction(7, 10) * i - Fraction(3, 10) * i * (i - 1) + Fraction(1, 10) * i * (i - 1) * (i - 2)


def higher_boundary_factored(i: int) -> Fraction:
    _check_index(i)
    return Fraction(7, 10) * (i + 1) - Fraction(6, 10) * i


@dataclass(frozen=True)
class BoundarySet:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != NUM_PATTERNS or len(self.upper) != NUM_PATTERNS:
            raise ConfigError("a boundary set needs four lower and four upper values")
        if self.lower[0] != 0.0 or self.upper[-1] != 1.0:
            raise ConfigError("boundaries must start at 0 and end at 1")
        for i in range(NUM_PATTERNS):
            if not self.lower[i] < self.upper[i]:
                raise ConfigError(f"empty interval for pattern {i + 1}")
        for i in range(NUM_PATTERNS - 1):
            if abs(self.upper[i] - self.lower[i + 1]) > 1e-12:
                raise ConfigError(f"intervals of patterns {i + 1} and {i + 2} are not contiguous")

    @classmethod
    def from_edges(cls, *edges: float) -> "BoundarySet":
        """Build from the three interior edges, e.g. ``from_edges(0.7, 0.8, 0.9)``."""
        cuts = (0.0, *edges, 1.0)
        return cls(tuple(cuts[:-1]), tuple(cuts[1:]))

    @classmethod
    def polynomial(cls) -> "BoundarySet":
        # rounded so that edges such as 0.7 compare exactly in select_pattern
        return cls(
            tuple(round(lower_boundary(i), 12) for i in range(NUM_PATTERNS)),
            tuple(round(higher_boundary(i), 12) for i in range(NUM_PATTERNS)),
        )


# Candidate boundary sets for the parametric study, keyed 1..5.  Set 5's
# third interior edge is 0.975: its third interval ends at 0.97 while the
# fourth starts at 0.975, and contiguity is restored by extending pattern 3.
BOUNDARY_SETS = {
    1: BoundarySet.from_edges(0.25, 0.5, 0.75),
    2: BoundarySet.from_edges(0.5, 0.7, 0.9),
    3: BoundarySet.from_edges(0.6, 0.7, 0.9),
    4: BoundarySet.polynomial(),
    5: BoundarySet.from_edges(0.9, 0.95, 0.975),
}


def boundary_set(set_id: int) -> BoundarySet:
    try:
        return BOUNDARY_SETS[set_id]
    except KeyError:
        raise ConfigError(f"boundary set must be one of {sorted(BOUNDARY_SETS)}, got {set_id}") from None


def cross_correlation(p1: np.ndarray, p2: np.ndarray) -> float:
    """Magnitude of the energy-normalized inner product, clamped to [0, 1]."""
    p1 = np.asarray(p1, dtype=complex).ravel()
    p2 = np.asarray(p2, dtype=complex).ravel()
    if p1.size != p2.size or p1.size == 0:
        raise LengthMismatch(f"pilot vectors must have equal nonzero length ({p1.size}, {p2.size})")
    e1 = np.vdot(p1, p1).real
    e2 = np.vdot(p2, p2).real
    if e1 == 0.0 or e2 == 0.0:
        raise ZeroEnergy("pilot observation has zero energy")
    r = abs(np.vdot(p2, p1)) / np.sqrt(e1 * e2)
    return float(min(max(r, 0.0), 1.0))


def select_pattern(r: float, boundaries: BoundarySet, n: int = 1, pilots: int = 1) -> PatternSpec:
    """Pattern whose half-open interval [LB, HB) holds ``r``; r = 1 maps to pattern 4."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"correlation must lie in [0, 1], got {r}")
    for i in range(NUM_PATTERNS - 1, -1, -1):
        if r >= boundaries.lower[i]:
            return PatternSpec.for_index(i, n, pilots)
    raise AssertionError("unreachable: lower[0] == 0")


def ber_error(measured: float, threshold: float) -> float:
    return measured - threshold


class Action(enum.Enum):
    CONTINUE = "continue"
    RESET = "reset"


class PatternController:
    """Receiver-side state machine; one instance per simulated link.

    Each event yields one scalar for the feedback channel: the correlation
    after a sounding, the BER error after a data symbol.
    """

    def __init__(
        self,
        boundaries: BoundarySet | None = None,
        ber_threshold: float = 1e-2,
        ber_window: int = 10_000,
        n: int = 1,
        pilots_per_sounding: int = 1,
    ):
        self.boundaries = boundaries or BoundarySet.polynomial()
        self.ber_threshold = ber_threshold
        self.ber_window = ber_window
        self.n = n
        self.pilots_per_sounding = pilots_per_sounding
        self.pattern = PatternSpec.for_index(0, n, pilots_per_sounding)
        self.prev_pilot_obs: np.ndarray | None = None
        self.symbols_until_next_sounding = 0
        self.last_r: float | None = None
        self.last_windowed_ber: float | None = None
        self.last_error: float | None = None
        self._window: deque[tuple[int, int]] = deque()
        self.ber_window_errors = 0
        self.ber_window_bits = 0

    def on_sounding(self, pilot_obs: np.ndarray) -> PatternSpec:
        obs = np.array(pilot_obs, dtype=complex)
        if self.prev_pilot_obs is None:
            self.last_r = None
            self.pattern = PatternSpec.for_index(0, self.n, self.pilots_per_sounding)
        else:
            self.last_r = cross_correlation(self.prev_pilot_obs, obs)
            self.pattern = select_pattern(self.last_r, self.boundaries, self.n, self.pilots_per_sounding)
        self.prev_pilot_obs = obs
        self.symbols_until_next_sounding = self.pattern.period - 1
        return self.pattern

    def on_data_symbol(self, bit_errors: int, bits: int) -> Action:
        if bits <= 0:
            raise ValueError("a data symbol must carry at least one bit")
        self._window.append((bit_errors, bits))
        self.ber_window_errors += bit_errors
        self.ber_window_bits += bits
        # slide: keep the shortest suffix still holding ber_window bits
        while self.ber_window_bits - self._window[0][1] >= self.ber_window:
            e, b = self._window.popleft()
            self.ber_window_errors -= e
            self.ber_window_bits -= b
        self.symbols_until_next_sounding = max(self.symbols_until_next_sounding - 1, 0)

        if self.ber_window_bits < self.ber_window:
            self.last_windowed_ber = None
            self.last_error = None
            return Action.CONTINUE
        self.last_windowed_ber = self.ber_window_errors / self.ber_window_bits
        self.last_error = ber_error(self.last_windowed_ber, self.ber_threshold)
        if self.last_error > 0:
            self.reset()
            return Action.RESET
        return Action.CONTINUE

    def reset(self) -> None:
        self.pattern = PatternSpec.for_index(0, self.n, self.pilots_per_sounding)
        self.prev_pilot_obs = None
        self._window.clear()
        self.ber_window_errors = 0
        self.ber_window_bits = 0
        self.symbols_until_next_sounding = 0
