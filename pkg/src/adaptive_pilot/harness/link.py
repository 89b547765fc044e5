"""End-to-end link simulation with fixed or adaptive pilot scheduling."""

from __future__ import annotations

import csv
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..channel import ChannelProfile, apply_channel, realize_channel
from ..constellation import map_bits
from ..controller import (
    NUM_PATTERNS,
    Action,
    BoundarySet,
    PatternController,
    PatternSpec,
)
from ..errors import ConfigError
from ..estimation import ChannelEstimate, check_layout_admissible, ls_estimate
from ..grid import Arrangement, LinkConfig, PilotLayout, Role
from ..phy import demodulate, equalize_and_demap, modulate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FixedPattern:
    pattern: int = 1  # 1..4

    def __post_init__(self):
        if not 1 <= self.pattern <= NUM_PATTERNS:
            raise ConfigError(f"fixed pattern must be 1..4, got {self.pattern}")

    @property
    def name(self) -> str:
        return f"fixed-p{self.pattern}"


@dataclass(frozen=True)
class Adaptive:
    boundaries: BoundarySet = field(default_factory=BoundarySet.polynomial)

    @property
    def name(self) -> str:
        return "adaptive"


@dataclass(frozen=True)
class RunMetrics:
    snr_db: float
    total_bits: int
    bit_errors: int
    ber: float
    data_rate_fraction: float
    pattern_occupancy: tuple[float, ...]
    resets: int
    seed: int
    sounding_counts: tuple[int, ...] = (0, 0, 0, 0)
    data_cells: int = 0
    pilot_cells: int = 0
    max_windowed_ber: float = math.nan
    erasures: int = 0


@dataclass(frozen=True)
class TraceRow:
    t: int
    event: str  # SOUND, DATA or RESET
    r: float | None
    pattern: int
    period: int
    windowed_ber: float | None
    e: float | None


TRACE_COLUMNS = ("t", "event", "R", "pattern", "period", "windowed_BER", "e")


def write_trace(rows, path: str | Path) -> None:
    def fmt(v):
        return "" if v is None else repr(v)

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for r in rows:
            w.writerow([r.t, r.event, fmt(r.r), r.pattern, r.period, fmt(r.windowed_ber), fmt(r.e)])


def _seed_int(seed_seq: np.random.SeedSequence) -> int:
    return int(seed_seq.generate_state(1, np.uint64)[0])


def _candidate_receptions(config, profile, taps, bits, snr_db, noise_seed):
    """Receive every slot both as a sounding symbol and as a pure data symbol.

    The channel is linear and static within a symbol, so the two candidate
    transmissions share taps and noise and the scheduler can pick either
    afterwards without changing what the other slots see.
    """
    n = config.num_subcarriers
    data_syms = map_bits(bits.ravel(), config.modulation_order).reshape(-1, n)
    sound_syms = data_syms.copy()
    sound_syms[:, config.pilot_indices] = config.pilot_values[config.pilot_indices]

    def through(syms):
        tx = modulate(syms, config)
        rx = apply_channel(tx, taps, profile, snr_db, np.random.default_rng(noise_seed))
        return demodulate(rx, config)

    return through(sound_syms), through(data_syms)


def run_link(
    config: LinkConfig,
    profile: ChannelProfile,
    mode: FixedPattern | Adaptive,
    num_symbols: int,
    seed: int,
    *,
    rho_schedule: np.ndarray | None = None,
    trace: list | None = None,
) -> RunMetrics:
    """Simulate ``num_symbols`` OFDM symbols and aggregate link metrics.

    Soundings carry the known pilot tones (every subcarrier for block-type
    sounding, every ``pilot_subcarrier_spacing``-th tone otherwise).  The
    last LS estimate is held until the next sounding.  In adaptive mode the
    controller's decisions reach the transmitter ``feedback_delay`` symbols
    after the symbol that produced them.
    """
    if num_symbols < 1:
        raise ConfigError("num_symbols must be >= 1")
    if profile.max_delay > config.cp_length:
        raise ConfigError(
            f"channel delay spread {profile.max_delay} exceeds cp_length {config.cp_length}"
        )
    n_sc = config.num_subcarriers
    bps = config.modulation_order
    pilot_idx = config.pilot_indices
    known = config.pilot_values[pilot_idx]
    comb = pilot_idx.size < n_sc
    if comb:
        report = check_layout_admissible(
            PilotLayout(Arrangement.COMB, 1, config.pilot_subcarrier_spacing), profile, config
        )
        if not report.ok:
            log.warning(report.message)

    ch_seq, noise_seq, bit_seq, erase_seq = np.random.SeedSequence(seed).spawn(4)
    taps = realize_channel(profile, num_symbols, np.random.default_rng(ch_seq), rho=rho_schedule)
    bits = np.random.default_rng(bit_seq).integers(0, 2, size=(num_symbols, n_sc * bps), dtype=np.int8)
    rx_sound, rx_data = _candidate_receptions(config, profile, taps, bits, config.snr_db, _seed_int(noise_seq))
    erase_rng = np.random.default_rng(erase_seq)

    adaptive = isinstance(mode, Adaptive)
    base = PatternSpec.for_index(0, config.base_pilot_period, config.pilots_per_sounding)
    ctrl = None
    if adaptive:
        ctrl = PatternController(
            mode.boundaries,
            config.ber_threshold,
            config.ber_window,
            config.base_pilot_period,
            config.pilots_per_sounding,
        )
        tx_pattern = base
    else:
        tx_pattern = PatternSpec.for_index(mode.pattern - 1, config.base_pilot_period, config.pilots_per_sounding)

    sound_roles = np.full((1, n_sc), Role.DATA, dtype=np.int8)
    sound_roles[0, pilot_idx] = Role.PILOT
    data_bits_sounding = (n_sc - pilot_idx.size) * bps
    chunk = 8 * config.base_pilot_period + config.feedback_delay

    pending: deque = deque()
    delay = config.feedback_delay
    next_sound = 0
    last_sound = None
    estimate: ChannelEstimate | None = None
    cache_start, cache_errs = 0, np.zeros(0, dtype=np.int64)
    counts = [0] * NUM_PATTERNS
    errors = total = data_cells = pilot_cells = resets = erasures = 0
    max_wber = -1.0

    def data_errors(rows_rx, rows_bits, roles):
        nonlocal erasures
        eq = equalize_and_demap(rows_rx, estimate, roles, config, erase_rng)
        erasures += eq.erasures
        wrong = eq.hard_bits != rows_bits.ravel()
        return wrong.reshape(rows_rx.shape[0], -1).sum(axis=1)

    def feed(t, nerr, nbits):
        nonlocal resets, max_wber
        action = ctrl.on_data_symbol(nerr, nbits)
        if ctrl.last_windowed_ber is not None:
            max_wber = max(max_wber, ctrl.last_windowed_ber)
        if action is Action.RESET:
            resets += 1
            pending.append((t + 1 + delay, "reset", None))
        return action

    for t in range(num_symbols):
        while pending and pending[0][0] <= t:
            _, kind, pat = pending.popleft()
            if kind == "reset":
                tx_pattern = base
                next_sound = t
            else:
                tx_pattern = pat
                if last_sound is not None:
                    next_sound = max(last_sound + tx_pattern.period, t)

        if t >= next_sound:
            obs = rx_sound[t, pilot_idx]
            estimate = ls_estimate(obs, known, pilot_idx, n_sc, sounded_at=t)
            cache_errs = np.zeros(0, dtype=np.int64)
            pilot_cells += pilot_idx.size
            last_sound = t
            event = "SOUND"
            if adaptive:
                chosen = ctrl.on_sounding(estimate.source_pilot_obs)
                pending.append((t + 1 + delay, "pattern", chosen))
            else:
                chosen = tx_pattern
            counts[chosen.index] += 1
            next_sound = t + tx_pattern.period
            if data_bits_sounding:
                eq =equalize_and_demap(rx_sound[t : t + 1], estimate, sound_roles, config, erase_rng)
                erasures += eq.erasures
                sent = bits[t].reshape(n_sc, bps)[sound_roles[0] == Role.DATA].ravel()
                nerr = int(np.count_nonzero(eq.hard_bits != sent))
                errors += nerr
                total += data_bits_sounding
                data_cells += n_sc - pilot_idx.size
                if adaptive and feed(t, nerr, data_bits_sounding) is Action.RESET:
                    event = "RESET"
            if trace is not None:
                trace.append(_trace_row(t, event, ctrl, chosen))
            continue

        # data symbol under the held estimate
        if estimate is None:
            raise AssertionError("data symbol scheduled before the first sounding")
        pos = t - cache_start
        if pos < 0 or pos >= cache_errs.size:
            stop = min(t + chunk, num_symbols)
            roles = np.zeros((stop - t, n_sc), dtype=np.int8)
            cache_start, cache_errs = t, data_errors(rx_data[t:stop], bits[t:stop], roles)
            pos = 0
        nerr = int(cache_errs[pos])
        errors += nerr
        total += n_sc * bps
        data_cells += n_sc
        event = "DATA"
        if adaptive and feed(t, nerr, n_sc * bps) is Action.RESET:
            event = "RESET"
        if trace is not None:
            trace.append(_trace_row(t, event, ctrl, ctrl.pattern if adaptive else tx_pattern))

    soundings = sum(counts)
    occupancy = tuple(c / soundings for c in counts) if soundings else (0.0,) * NUM_PATTERNS
    cells = data_cells + pilot_cells
    return RunMetrics(
        snr_db=float(config.snr_db),
        total_bits=total,
        bit_errors=errors,
        ber=errors / total if total else 0.0,
        data_rate_fraction=data_cells / cells if cells else 0.0,
        pattern_occupancy=occupancy,
        resets=resets,
        seed=int(seed),
        sounding_counts=tuple(counts),
        data_cells=data_cells,
        pilot_cells=pilot_cells,
        max_windowed_ber=max_wber if max_wber >= 0 else math.nan,
        erasures=erasures,
    )


def _trace_row(t, event, ctrl, pattern) -> TraceRow:
    if ctrl is None:
        return TraceRow(t, event, None, pattern.number, pattern.period, None, None)
    r = ctrl.last_r if event == "SOUND" else None
    return TraceRow(t, event, r, pattern.number, pattern.period, ctrl.last_windowed_ber, ctrl.last_error)
