"""Diffusive point-to-sphere channel with Poisson reception.

Models a 3-D unbounded medium with a point transmitter and a spherical
absorbing receiver. Particle capture per symbol slot is summarized by the
first-hitting statistics of Brownian motion; the per-slot received count is
Poisson with a mean that superposes the current emission, residual ISI from
up to ``channel_memory`` earlier slots, and a uniform background rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

# Poisson sampling above this mean switches to a matched-moment normal draw
# (never reached at the nominal parameter scales; guards against overflow).
_POISSON_NORMAL_CUTOVER = 1.0e6


@dataclass(frozen=True)
class ChannelParams:
    """Physical constants and slot geometry of the diffusion channel.

    Attributes
    ----------
    diffusion_coefficient : float
        D, in m^2/s.
    receiver_radius : float
        Absorbing sphere radius r, in m.
    distance : float
        Center-to-center transmitter-receiver distance d, in m. Must
        exceed the receiver radius.
    noise_rate : float
        Background arrival rate lambda_0, in 1/s.
    slot_duration : float
        Symbol slot length T, in s.
    channel_memory : int
        Number of past slots L whose residue still reaches the receiver.
    """

    diffusion_coefficient: float
    receiver_radius: float
    distance: float
    noise_rate: float
    slot_duration: float
    channel_memory: int

    def __post_init__(self):
        if self.diffusion_coefficient <= 0:
            raise ValueError("diffusion_coefficient must be positive")
        if not 0 < self.receiver_radius < self.distance:
            raise ValueError("need distance > receiver_radius > 0")
        if self.slot_duration <= 0:
            raise ValueError("slot_duration must be positive")
        if self.noise_rate < 0:
            raise ValueError("noise_rate must be nonnegative")
        if self.channel_memory < 0:
            raise ValueError("channel_memory must be nonnegative")

    @property
    def noise_mean(self) -> float:
        """Mean background count per slot, lambda_0 * T."""
        return self.noise_rate * self.slot_duration


@dataclass(frozen=True)
class ChannelCoefficients:
    """Mean received counts per slot for one emission, plus the noise mean.

    ``coeffs[j]`` is the average number of particles captured j slots after
    their release; ``coeffs[0]`` belongs to the emitting slot itself.
    """

    coeffs: np.ndarray
    noise_mean: float

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("coeffs must be a nonempty 1-D vector")
        if np.any(self.coeffs < 0) or self.noise_mean < 0:
            raise ValueError("coefficients and noise mean must be nonnegative")

    @property
    def memory(self) -> int:
        """Channel memory L implied by the coefficient vector."""
        return self.coeffs.size - 1


def hitting_rate(t, p: ChannelParams):
    """First-hitting rate (1/s) of a particle released at time 0.

    Accepts a scalar or array time; every entry must be positive.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ValueError("hitting_rate requires t > 0")
    r, d, D = p.receiver_radius, p.distance, p.diffusion_coefficient
    gap = d - r
    out = (r * gap) / (d * np.sqrt(4.0 * math.pi * D * t**3)) * np.exp(
        -(gap**2) / (4.0 * D * t)
    )
    return out if out.ndim else float(out)


def slot_hit_probability(slot_index: int, p: ChannelParams) -> float:
    """Probability of capture during the ``slot_index``-th slot after release.

    Slot 1 covers [0, T); slot i covers [(i-1)T, iT). Closed form via the
    complementary error function; the i = 1 lower edge contributes zero.
    """
    if slot_index < 1:
        raise ValueError("slot_index must be >= 1")
    r, d, D, T = (
        p.receiver_radius,
        p.distance,
        p.diffusion_coefficient,
        p.slot_duration,
    )
    gap = d - r
    upper = erfc(gap / math.sqrt(4.0 * D * slot_index * T))
    lower = 0.0
    if slot_index > 1:
        lower = erfc(gap / math.sqrt(4.0 * D * (slot_index - 1) * T))
    return (r / d) * (upper - lower)


def ntx_from_snr(snr_db: float, p: ChannelParams) -> float:
    """Particles per emission needed to hit a target SNR (dB).

    SNR is the ratio of the same-slot signal mean to twice the background
    mean, so N_TX = 2 * lambda_0 * T * 10^(SNR/10) / P_0.
    """
    p0 = slot_hit_probability(1, p)
    if p0 <= 0:
        raise ValueError("degenerate channel: same-slot hit probability is 0")
    return 2.0 * p.noise_mean * 10.0 ** (snr_db / 10.0) / p0


def snr_from_ntx(n_tx: float, p: ChannelParams) -> float:
    """Inverse of :func:`ntx_from_snr`: SNR in dB induced by ``n_tx``."""
    c0 = n_tx * slot_hit_probability(1, p)
    if c0 <= 0 or p.noise_mean <= 0:
        raise ValueError("SNR undefined for zero signal or zero noise mean")
    return 10.0 * math.log10(c0 / (2.0 * p.noise_mean))


def channel_coefficients(p: ChannelParams, n_tx: float) -> ChannelCoefficients:
    """Mean-count vector C_0..C_L for ``n_tx`` particles per emission."""
    if n_tx <= 0:
        raise ValueError("n_tx must be positive")
    coeffs = n_tx * np.array(
        [slot_hit_probability(j + 1, p) for j in range(p.channel_memory + 1)]
    )
    return ChannelCoefficients(coeffs=coeffs, noise_mean=p.noise_mean)


def level_amplitudes(levels: int) -> np.ndarray:
    """Emission amplitude per symbol level: level k releases k/(M-1) of N_TX."""
    if levels < 2:
        raise ValueError("levels must be >= 2")
    return np.arange(levels) / (levels - 1)


def received_mean(
    symbols: np.ndarray, c: ChannelCoefficients, levels: int = 2
) -> np.ndarray:
    """Per-slot Poisson mean for a symbol stream (zeros before slot 0)."""
    symbols = np.asarray(symbols)
    if symbols.ndim != 1 or symbols.size == 0:
        raise ValueError("symbols must be a nonempty 1-D sequence")
    if np.any(symbols < 0) or np.any(symbols >= levels):
        raise ValueError(f"symbols must lie in [0, {levels})")
    amps = symbols / (levels - 1)
    return c.noise_mean + np.convolve(amps, c.coeffs)[: symbols.size]


def simulate_reception(
    symbols: np.ndarray,
    c: ChannelCoefficients,
    rng_seed,
    levels: int = 2,
) -> np.ndarray:
    """Draw one Poisson received-count sequence for a symbol stream.

    Deterministic for a fixed ``rng_seed``. Counts come back as int64; means
    beyond the normal-approximation cutover are sampled as rounded Gaussians
    with matched mean and variance.
    """
    means = received_mean(symbols, c, levels)
    rng = np.random.default_rng(rng_seed)
    big = means > _POISSON_NORMAL_CUTOVER
    counts = rng.poisson(np.where(big, 0.0, means)).astype(np.int64)
    if big.any():
        gauss = rng.normal(means[big], np.sqrt(means[big]))
        counts[big] = np.maximum(np.rint(gauss), 0.0).astype(np.int64)
    return counts
