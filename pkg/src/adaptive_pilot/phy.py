"""Transmit/receive OFDM processing: IFFT + cyclic prefix, FFT, ZF equalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import demap_symbols
from .errors import LengthMismatch, SingularEstimate
from .grid import LinkConfig, OfdmGrid, Role

# relative gain floor below which a subcarrier is treated as erased
GAIN_FLOOR = 1e-6


@dataclass(frozen=True)
class TimeDomainSignal:
    samples: np.ndarray
    samples_per_symbol: int

    def __post_init__(self):
        if self.samples.ndim != 1 or self.samples.size % self.samples_per_symbol:
            raise LengthMismatch(
                f"{self.samples.size} samples is not a multiple of {self.samples_per_symbol}"
            )

    @property
    def num_symbols(self) -> int:
        return self.samples.size // self.samples_per_symbol

    def frames(self) -> np.ndarray:
        """View as (num_symbols, samples_per_symbol)."""
        return self.samples.reshape(self.num_symbols, self.samples_per_symbol)


@dataclass(frozen=True)
class EqualizedSymbols:
    values: np.ndarray  # equalized Data cells in (t, k) order
    hard_bits: np.ndarray
    erasures: int = 0


def modulate(grid: OfdmGrid | np.ndarray, config: LinkConfig) -> TimeDomainSignal:
    """Unitary IFFT per symbol with a cyclic prefix of ``cp_length`` samples.

    Accepts either an :class:`OfdmGrid` or a bare (symbols x subcarriers)
    matrix of frequency-domain values.
    """
    x = grid.symbols if isinstance(grid, OfdmGrid) else np.asarray(grid, dtype=complex)
    if x.ndim != 2 or x.shape[1] != config.num_subcarriers:
        raise LengthMismatch(f"grid has shape {x.shape}, expected (*, {config.num_subcarriers})")
    useful = np.fft.ifft(x, axis=1, norm="ortho")
    cp = config.cp_length
    framed = np.concatenate([useful[:, useful.shape[1] - cp:], useful], axis=1)
    return TimeDomainSignal(framed.ravel(), config.samples_per_symbol)


def demodulate(signal: TimeDomainSignal, config: LinkConfig) -> np.ndarray:
    """Strip the cyclic prefix and apply the unitary FFT per symbol."""
    if signal.samples_per_symbol != config.samples_per_symbol:
        raise LengthMismatch(
            f"signal framed at {signal.samples_per_symbol} samples/symbol, "
            f"config expects {config.samples_per_symbol}"
        )
    useful = signal.frames()[:, config.cp_length:]
    return np.fft.fft(useful, axis=1, norm="ortho")


def equalize_and_demap(
    received: np.ndarray,
    estimate,
    grid_roles: np.ndarray,
    config: LinkConfig,
    rng: np.random.Generator | None = None,
) -> EqualizedSymbols:
    """Zero-forcing equalization and hard decisions on the Data cells.

    ``estimate`` is a ChannelEstimate or a gain array broadcastable to
    ``received``.  Subcarriers whose gain magnitude falls below
    ``GAIN_FLOOR * max|H|`` get seeded random bits and count as erasures.
    """
    received = np.asarray(received, dtype=complex)
    gains = np.asarray(getattr(estimate, "gains", estimate), dtype=complex)
    gains = np.broadcast_to(gains, received.shape)
    data = np.asarray(grid_roles) == Role.DATA
    if data.shape != received.shape:
        raise LengthMismatch(f"roles {data.shape} vs received {received.shape}")

    mag = np.abs(gains)
    peak = mag.max() if mag.size else 0.0
    if not np.isfinite(peak) or peak == 0.0:
        raise SingularEstimate("channel estimate is zero or non-finite everywhere")
    usable = mag >= GAIN_FLOOR * peak

    y = received[data]
    h = gains[data]
    ok = usable[data]
    values = np.where(ok, y / np.where(ok, h, 1.0), 0.0)
    bits = demap_symbols(values, config.modulation_order)
    erased = int(np.count_nonzero(~ok))
    if erased:
        rng = rng if rng is not None else np.random.default_rng(config.rng_seed)
        per = config.modulation_order
        cell_bits = bits.reshape(-1, per)
        cell_bits[~ok] = rng.integers(0, 2, size=(erased, per))
        values = np.where(ok, values, np.nan)
    return EqualizedSymbols(values, bits, erased)
