"""Block-static tapped-delay-line fading with Gauss-Markov tap evolution, plus AWGN.

Each tap follows ``h' = sqrt(rho) h + sqrt(1 - rho) w`` once per OFDM symbol,
with ``w`` circular Gaussian of the tap's mean power, so the marginal tap
power is preserved for every ``rho``.  ``rho = 1`` freezes the channel and
``rho = 0`` redraws it independently every symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, LengthMismatch
from .phy import TimeDomainSignal

# stationarity fraction for the five channel models, most stationary first
MODEL_RHO = {1: 1.0, 2: 0.8, 3: 0.6, 4: 0.4, 5: 0.2}

DEFAULT_DELAYS = (0, 1, 3, 5)
DEFAULT_DECAY = 2.0  # samples


@dataclass(frozen=True)
class ChannelProfile:
    tap_delays: tuple[int, ...] = DEFAULT_DELAYS
    tap_powers: tuple[float, ...] = ()
    rho: float = 1.0

    def __post_init__(self):
        delays = tuple(int(d) for d in self.tap_delays)
        powers = tuple(float(p) for p in self.tap_powers) or exponential_powers(delays)
        object.__setattr__(self, "tap_delays", delays)
        object.__setattr__(self, "tap_powers", powers)
        if not delays or delays[0] != 0:
            raise ConfigError("tap_delays must be non-empty and start at 0")
        if any(b <= a for a, b in zip(delays, delays[1:])):
            raise ConfigError("tap_delays must be strictly increasing")
        if len(powers) != len(delays):
            raise ConfigError("tap_powers and tap_delays differ in length")
        if min(powers) < 0 or abs(sum(powers) - 1.0) > 1e-9:
            raise ConfigError(f"tap_powers must be non-negative and sum to 1, got {sum(powers)!r}")
        if not 0.0 <= self.rho <= 1.0:
            raise ConfigError(f"rho must lie in [0, 1], got {self.rho}")

    @property
    def num_taps(self) -> int:
        return len(self.tap_delays)

    @property
    def max_delay(self) -> int:
        return self.tap_delays[-1]

    def with_rho(self, rho: float) -> "ChannelProfile":
        return ChannelProfile(self.tap_delays, self.tap_powers, rho)


def exponential_powers(delays, decay: float = DEFAULT_DECAY) -> tuple[float, ...]:
    p = np.exp(-np.asarray(delays, dtype=float) / decay)
    return tuple((p / p.sum()).tolist())


def model_profile(model: int, base: ChannelProfile | None = None) -> ChannelProfile:
    """Profile for channel model 1..5 (100% .. 20% stationarity)."""
    if model not in MODEL_RHO:
        raise ConfigError(f"channel model must be one of {sorted(MODEL_RHO)}, got {model}")
    return (base or ChannelProfile()).with_rho(MODEL_RHO[model])


@dataclass(frozen=True)
class ChannelState:
    tap_gains: np.ndarray
    symbol_index: int = 0


def _as_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _cgauss(rng: np.random.Generator, powers: np.ndarray, lead: tuple = ()) -> np.ndarray:
    # real parts then imaginary parts, so batched draws match sequential ones
    z = rng.standard_normal(lead + (2, powers.size))
    return (z[..., 0, :] + 1j * z[..., 1, :]) * np.sqrt(powers / 2.0)


def init_channel(profile: ChannelProfile, seed) -> ChannelState:
    rng = _as_rng(seed)
    return ChannelState(_cgauss(rng, np.asarray(profile.tap_powers)), 0)


def step_channel(state: ChannelState, profile: ChannelProfile, rng) -> ChannelState:
    rng = _as_rng(rng)
    w = _cgauss(rng, np.asarray(profile.tap_powers))
    rho = profile.rho
    h = np.sqrt(rho) * state.tap_gains + np.sqrt(1.0 - rho) * w
    return ChannelState(h, state.symbol_index + 1)


def realize_channel(profile: ChannelProfile, num_symbols: int, seed, rho=None) -> np.ndarray:
    """Tap gains for ``num_symbols`` consecutive symbols, shape (T, taps).

    Draws the same random stream as ``init_channel`` followed by repeated
    ``step_channel`` calls.  ``rho`` may be a per-symbol array overriding the
    profile (entry ``t`` governs the step into symbol ``t``).
    """
    rng = _as_rng(seed)
    powers = np.asarray(profile.tap_powers)
    w = _cgauss(rng, powers, (num_symbols,))
    rho = np.broadcast_to(np.asarray(profile.rho if rho is None else rho, dtype=float), (num_symbols,))
    a = np.sqrt(rho)
    b = np.sqrt(1.0 - rho)
    h = np.empty_like(w)
    h[0] = w[0]
    for t in range(1, num_symbols):
        h[t] = a[t] * h[t - 1] + b[t] * w[t]
    return h


def true_frequency_response(state, profile: ChannelProfile, num_subcarriers: int) -> np.ndarray:
    """H(k) = sum_m h_m exp(-j 2 pi k d_m / N); ``state`` may be a ChannelState,
    a tap vector, or a (T, taps) array."""
    h = np.asarray(getattr(state, "tap_gains", state))
    k = np.arange(num_subcarriers)
    phasors = np.exp(-2j * np.pi * np.outer(np.asarray(profile.tap_delays), k) / num_subcarriers)
    return h @ phasors


def apply_channel(
    signal: TimeDomainSignal,
    states,
    profile: ChannelProfile,
    snr_db: float,
    rng=None,
) -> TimeDomainSignal:
    """Convolve the sample stream with the per-symbol tap set, then add AWGN.

    ``states`` is a sequence of ChannelState or a (symbols, taps) array.  The
    taps of symbol ``t`` act on every output sample of symbol ``t``; spill-over
    from the previous symbol lands in the cyclic prefix.  Noise variance is the
    measured mean received power divided by the linear SNR, which with the
    unitary transforms equals the per-subcarrier SNR.
    """
    taps = np.asarray([getattr(s, "tap_gains", s) for s in states]) if not isinstance(states, np.ndarray) else states
    if taps.shape != (signal.num_symbols, profile.num_taps):
        raise LengthMismatch(
            f"need ({signal.num_symbols}, {profile.num_taps}) tap gains, got {taps.shape}"
        )
    x = signal.samples
    sps = signal.samples_per_symbol
    y = np.zeros((signal.num_symbols, sps), dtype=complex)
    shifted = np.zeros(x.size, dtype=complex)
    for m, d in enumerate(profile.tap_delays):
        shifted[:d] = 0.0
        shifted[d:] = x[: x.size - d]
        y += taps[:, m, None] * shifted.reshape(y.shape)
    y = y.ravel()

    if np.isfinite(snr_db):
        power = float(np.mean(np.abs(y) ** 2)) if y.size else 0.0
        var = power / 10.0 ** (snr_db / 10.0)
        rng = _as_rng(rng)
        z = rng.standard_normal((2, y.size))
        y = y + np.sqrt(var / 2.0) * (z[0] + 1j * z[1])
    return TimeDomainSignal(y, sps)
