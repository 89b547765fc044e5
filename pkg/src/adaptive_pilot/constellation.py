"""Gray-coded square QAM mapping and hard-decision demapping.

Only QPSK (2 bits/symbol) and 16-QAM (4 bits/symbol) are supported. Both are
normalized to unit average energy. Each axis carries half of the bits and is
Gray coded independently, so hard decisions are separable per axis.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

SUPPORTED_ORDERS = (2, 4)

# Gray-coded PAM levels per axis, indexed by the integer value of the axis bits
# (MSB first).  00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3 for 4-PAM.
_PAM_LEVELS = {
    1: np.array([1.0, -1.0]),
    2: np.array([3.0, 1.0, -3.0, -1.0]),
}
_PAM_SCALE = {1: 1.0 / np.sqrt(2.0), 2: 1.0 / np.sqrt(10.0)}


def _check_order(bits_per_symbol: int) -> int:
    if bits_per_symbol not in SUPPORTED_ORDERS:
        raise ConfigError(
            f"modulation_order must be one of {SUPPORTED_ORDERS}, got {bits_per_symbol}"
        )
    return bits_per_symbol // 2


def _axis_values(bits: np.ndarray) -> np.ndarray:
    """Integer value of each row of axis bits, MSB first."""
    weights = 1 << np.arange(bits.shape[-1] - 1, -1, -1)
    return bits @ weights


def map_bits(bits: np.ndarray, bits_per_symbol: int = 2) -> np.ndarray:
    """Map a flat bit array onto unit-energy Gray QAM symbols."""
    half = _check_order(bits_per_symbol)
    bits = np.asarray(bits, dtype=np.int64).reshape(-1, bits_per_symbol)
    levels = _PAM_LEVELS[half]
    i = levels[_axis_values(bits[:, :half])]
    q = levels[_axis_values(bits[:, half:])]
    return (i + 1j * q) * _PAM_SCALE[half]


def _slice_axis(x: np.ndarray, half: int) -> np.ndarray:
    """Hard decision on one real axis, returning the Gray bits (..., half)."""
    if half == 1:
        return (x < 0).astype(np.int8)[..., None]
    # 4-PAM on unscaled levels {-3,-1,1,3}: first bit is the sign,
    # second bit is whether the point is in the inner pair.
    return np.stack([(x < 0), (np.abs(x) < 2.0)], axis=-1).astype(np.int8)


def demap_symbols(symbols: np.ndarray, bits_per_symbol: int = 2) -> np.ndarray:
    """Nearest-point hard decisions, returning a flat bit array in input order."""
    half = _check_order(bits_per_symbol)
    z = np.asarray(symbols, dtype=complex).ravel() / _PAM_SCALE[half]
    bits = np.concatenate([_slice_axis(z.real, half), _slice_axis(z.imag, half)], axis=-1)
    return bits.reshape(-1)


def alphabet(bits_per_symbol: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """All constellation points and their generating bits, in bit-value order."""
    n = 1 << bits_per_symbol
    labels = ((np.arange(n)[:, None] >> np.arange(bits_per_symbol - 1, -1, -1)) & 1).astype(np.int8)
    return map_bits(labels.ravel(), bits_per_symbol), labels


def pilot_sequence(length: int, seed: int) -> np.ndarray:
    """Seeded pseudo-random unit-magnitude QPSK pilots known to both link ends."""
    rng = np.random.default_rng(seed)
    return map_bits(rng.integers(0, 2, size=2 * length), 2)
