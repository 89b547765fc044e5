"""OFDM time-frequency lattice, cell roles and the shared link configuration."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .constellation import SUPPORTED_ORDERS, map_bits, pilot_sequence
from .errors import ConfigError, InsufficientBits, LayoutInvalid


class Role(enum.IntEnum):
    DATA = 0
    PILOT = 1
    NULL = 2


class Arrangement(str, enum.Enum):
    BLOCK = "block"
    COMB = "comb"


@dataclass(frozen=True)
class LinkConfig:
    """Parameters shared by every stage of the link.

    ``symbol_time`` is the time-domain sample period and defaults to
    ``1 / (num_subcarriers * subcarrier_bandwidth)``; delays measured in
    samples are multiplied by it to get seconds.  ``pilots_per_sounding``
    defaults to the number of pilot tones implied by
    ``pilot_subcarrier_spacing``.
    """

    num_subcarriers: int = 64
    cp_length: int = 8
    subcarrier_bandwidth: float = 15e3
    symbol_time: float | None = None
    modulation_order: int = 2
    base_pilot_period: int = 1
    pilots_per_sounding: int | None = None
    pilot_subcarrier_spacing: int = 1
    snr_db: float = 20.0
    ber_threshold: float = 1e-2
    ber_window: int = 10_000
    rng_seed: int = 0
    feedback_delay: int = 0

    def __post_init__(self):
        n = self.num_subcarriers
        if n < 8 or n & (n - 1):
            raise ConfigError(f"num_subcarriers must be a power of two >= 8, got {n}")
        if self.cp_length < 0 or self.cp_length >= n:
            raise ConfigError(f"cp_length must lie in [0, N), got {self.cp_length}")
        if self.subcarrier_bandwidth <= 0:
            raise ConfigError("subcarrier_bandwidth must be positive")
        if self.symbol_time is None:
            object.__setattr__(self, "symbol_time", 1.0 / (n * self.subcarrier_bandwidth))
        elif self.symbol_time <= 0:
            raise ConfigError("symbol_time must be positive")
        if self.modulation_order not in SUPPORTED_ORDERS:
            raise ConfigError(f"modulation_order must be one of {SUPPORTED_ORDERS}")
        if self.base_pilot_period < 1:
            raise ConfigError("base_pilot_period n must be >= 1")
        if not 1 <= self.pilot_subcarrier_spacing <= n:
            raise ConfigError("pilot_subcarrier_spacing must lie in [1, N]")
        tones = len(range(0, n, self.pilot_subcarrier_spacing))
        if self.pilots_per_sounding is None:
            object.__setattr__(self, "pilots_per_sounding", tones)
        elif self.pilots_per_sounding != tones:
            raise ConfigError(
                f"pilots_per_sounding={self.pilots_per_sounding} does not match the "
                f"{tones} tones implied by pilot_subcarrier_spacing={self.pilot_subcarrier_spacing}"
            )
        if not 0.0 < self.ber_threshold < 0.5:
            raise ConfigError("ber_threshold must lie in (0, 0.5)")
        if self.ber_window < 1:
            raise ConfigError("ber_window must be >= 1 bit")
        if self.feedback_delay < 0:
            raise ConfigError("feedback_delay must be >= 0")

    @property
    def samples_per_symbol(self) -> int:
        return self.num_subcarriers + self.cp_length

    @property
    def pilot_indices(self) -> np.ndarray:
        return np.arange(0, self.num_subcarriers, self.pilot_subcarrier_spacing)

    @property
    def pilot_values(self) -> np.ndarray:
        """Known pilot symbol per subcarrier; identical at every sounding."""
        return pilot_sequence(self.num_subcarriers, self.rng_seed)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class PilotLayout:
    arrangement: Arrangement = Arrangement.BLOCK
    time_period: int = 1
    freq_spacing: int = 1

    def validate(self) -> None:
        if self.time_period < 1 or self.freq_spacing < 1:
            raise LayoutInvalid("time_period and freq_spacing must be >= 1")
        if self.arrangement == Arrangement.BLOCK and self.freq_spacing != 1:
            raise LayoutInvalid("block-type layouts use every subcarrier (freq_spacing=1)")
        if self.arrangement == Arrangement.COMB and self.time_period != 1:
            raise LayoutInvalid("comb-type layouts carry pilots in every symbol (time_period=1)")

    @classmethod
    def block(cls, time_period: int) -> "PilotLayout":
        return cls(Arrangement.BLOCK, time_period, 1)

    @classmethod
    def comb(cls, freq_spacing: int) -> "PilotLayout":
        return cls(Arrangement.COMB, 1, freq_spacing)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OfdmGrid:
    """Time-major lattice: ``symbols[t, k]`` with a matching ``roles`` matrix."""

    symbols: np.ndarray
    roles: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.symbols.shape != self.roles.shape or self.symbols.ndim != 2:
            raise LayoutInvalid(
                f"symbols {self.symbols.shape} and roles {self.roles.shape} must be equal 2-D shapes"
            )
        object.__setattr__(self, "symbols", _readonly(self.symbols.astype(complex)))
        object.__setattr__(self, "roles", _readonly(self.roles.astype(np.int8)))

    @property
    def num_symbols(self) -> int:
        return self.symbols.shape[0]

    @property
    def num_subcarriers(self) -> int:
        return self.symbols.shape[1]

    def mask(self, role: Role) -> np.ndarray:
        return self.roles == role

    def dump_csv(self, path: str | Path) -> None:
        """Debug dump with columns ``t,k,role,re,im``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "k", "role", "re", "im"])
            for (t, k), v in np.ndenumerate(self.symbols):
                w.writerow([t, k, Role(self.roles[t, k]).name, repr(v.real), repr(v.imag)])


def pilot_roles(num_symbols: int, num_subcarriers: int, time_period: int, freq_spacing: int) -> np.ndarray:
    """Role matrix with pilots on every ``freq_spacing``-th tone of every
    ``time_period``-th symbol, starting at (0, 0)."""
    roles = np.full((num_symbols, num_subcarriers), Role.DATA, dtype=np.int8)
    roles[::time_period, ::freq_spacing] = Role.PILOT
    return roles


def build_grid(
    config: LinkConfig,
    layout: PilotLayout,
    num_symbols: int,
    data_bits: np.ndarray,
) -> tuple[OfdmGrid, np.ndarray]:
    """Fill a grid per ``layout`` and return it with the unused bits."""
    layout.validate()
    roles = pilot_roles(num_symbols, config.num_subcarriers, layout.time_period, layout.freq_spacing)
    data_bits = np.asarray(data_bits, dtype=np.int8).ravel()
    data_mask = roles == Role.DATA
    needed = int(data_mask.sum()) * config.modulation_order
    if data_bits.size < needed:
        raise InsufficientBits(f"need {needed} bits for the data cells, got {data_bits.size}")

    symbols = np.zeros(roles.shape, dtype=complex)
    pilots = np.broadcast_to(config.pilot_values, roles.shape)
    pilot_mask = roles == Role.PILOT
    symbols[pilot_mask] = pilots[pilot_mask]
    # boolean assignment fills in row-major (t, then k) order
    symbols[data_mask] = map_bits(data_bits[:needed], config.modulation_order)
    return OfdmGrid(symbols, roles), data_bits[needed:]


def data_rate_fraction(grid: OfdmGrid) -> float:
    """Share of non-null cells that carry data."""
    data = int(np.count_nonzero(grid.roles == Role.DATA))
    pilot = int(np.count_nonzero(grid.roles == Role.PILOT))
    if data + pilot == 0:
        return math.nan
    return data / (data + pilot)
