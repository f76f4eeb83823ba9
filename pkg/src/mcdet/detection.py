"""Poisson PMFs, pattern-conditioned means, thresholds, and detectors.

Pattern convention used throughout: a pattern is a tuple of symbol levels
ordered newest first, ``(s_i, s_{i-1}, ..., s_{i-m})``. Threshold tables are
keyed by the feedback pattern ``(s_{i-1}, ..., s_{i-m})``, i.e. the symbols
preceding the one under decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.special import gammaln

from mcdet import kernels
from mcdet.channel import ChannelCoefficients

# Relative gap below which the log-mean threshold is taken at its
# equal-means limit.
_EQUAL_MEANS_RTOL = 1e-9


def poisson_pmf(r, mean: float):
    """Poisson probability mass at ``r`` (scalar or array of counts).

    Evaluated in log space so counts up to ~1e6 stay finite. A zero mean
    degenerates to a point mass at zero.
    """
    if mean < 0:
        raise ValueError("mean must be nonnegative")
    r = np.asarray(r)
    if mean == 0:
        out = np.where(r == 0, 1.0, 0.0)
    else:
        out = np.exp(r * math.log(mean) - mean - gammaln(r + 1))
    return out if out.ndim else float(out)


def pmf_support(mean: float) -> np.ndarray:
    """Count range that carries all but a negligible tail of the mass."""
    hi = int(mean + 12.0 * math.sqrt(mean) + 20.0)
    return np.arange(hi + 1)


def mean_count(
    pattern: tuple, c: ChannelCoefficients, levels: int = 2
) -> float:
    """Mean received count given the ``len(pattern)-1`` most recent symbols.

    Symbols older than the pattern are averaged out; with equally spaced
    amplitudes their mean amplitude is 1/2 regardless of the level count.
    """
    m = len(pattern) - 1
    if m > c.memory:
        raise ValueError("pattern cannot be longer than the channel memory")
    amps = np.asarray(pattern) / (levels - 1)
    observed = float(np.dot(amps, c.coeffs[: m + 1]))
    residual = 0.5 * float(c.coeffs[m + 1 :].sum())
    return c.noise_mean + observed + residual


def exact_marginal_pmf(
    r, observed: tuple, c: ChannelCoefficients, levels: int = 2
):
    """PMF of the received count given only the most recent symbols.

    Marginalizes the unobserved older symbols uniformly: an equal-weight
    mixture of full-memory Poisson PMFs over all level assignments of the
    remaining ``L - m`` positions. This is the brute-force reference the
    single-mean approximation is judged against.
    """
    m = len(observed) - 1
    if m > c.memory:
        raise ValueError("observed pattern longer than the channel memory")
    amps = np.asarray(observed) / (levels - 1)
    base = c.noise_mean + float(np.dot(amps, c.coeffs[: m + 1]))
    tail = c.coeffs[m + 1 :]
    r = np.asarray(r)
    total = np.zeros(r.shape if r.ndim else ())
    combos = list(product(range(levels), repeat=tail.size))
    for combo in combos:
        mean = base + float(np.dot(np.asarray(combo) / (levels - 1), tail))
        total = total + poisson_pmf(r, mean)
    out = total / len(combos)
    return out if np.ndim(out) else float(out)


def threshold_from_means(mean_hi: float, mean_lo: float) -> float:
    """Optimal Poisson decision boundary between two means.

    The logarithmic mean ``(a - b)/ln(a/b)``; continuous at equal means
    where it returns the common value. Symmetric in its arguments.
    """
    if mean_hi <= 0 or mean_lo <= 0:
        raise ValueError("means must be positive")
    if abs(mean_hi - mean_lo) <= _EQUAL_MEANS_RTOL * mean_lo:
        return mean_lo
    return (mean_hi - mean_lo) / math.log(mean_hi / mean_lo)


@dataclass(frozen=True)
class MeanTable:
    """Pattern-conditioned mean counts for all ``levels**(memory+1)`` patterns."""

    means: dict
    memory: int
    levels: int = 2

    def __post_init__(self):
        expected = self.levels ** (self.memory + 1)
        if len(self.means) != expected:
            raise ValueError(
                f"mean table needs all {expected} patterns, got {len(self.means)}"
            )

    def __getitem__(self, pattern: tuple) -> float:
        return self.means[tuple(pattern)]


def exact_mean_table(
    c: ChannelCoefficients, memory: int, levels: int = 2
) -> MeanTable:
    """Theoretical mean table (known CSI) at the given feedback depth."""
    if memory > c.memory:
        raise ValueError("memory cannot exceed the channel memory")
    means = {
        pat: mean_count(pat, c, levels)
        for pat in product(range(levels), repeat=memory + 1)
    }
    return MeanTable(means=means, memory=memory, levels=levels)


@dataclass(frozen=True)
class ThresholdTable:
    """Sorted decision thresholds per feedback pattern.

    ``thresholds[pattern]`` has ``levels - 1`` ascending entries separating
    adjacent symbol levels. ``inversions`` counts adjacent-mean order
    violations met while building (possible with estimated means); the
    affected rows were re-sorted so detection still works.
    """

    thresholds: dict
    memory: int
    levels: int = 2
    inversions: int = 0
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.empty((self.levels**self.memory, self.levels - 1))
        for q in range(arr.shape[0]):
            pat = tuple(
                (q // self.levels**j) % self.levels for j in range(self.memory)
            )
            arr[q] = self.thresholds[pat]
        object.__setattr__(self, "_array", arr)

    def __getitem__(self, pattern: tuple) -> np.ndarray:
        return self.thresholds[tuple(pattern)]

    def as_array(self) -> np.ndarray:
        """(levels**memory, levels-1) array; row index encodes the feedback
        pattern base-``levels``, most recent symbol in the lowest digit."""
        return self._array


def build_threshold_table(mt: MeanTable) -> ThresholdTable:
    """Thresholds between each adjacent level pair under every feedback pattern."""
    levels, memory = mt.levels, mt.memory
    thresholds = {}
    inversions = 0
    for mem_pat in product(range(levels), repeat=memory):
        taus = []
        for k in range(1, levels):
            hi = mt[(k,) + mem_pat]
            lo = mt[(k - 1,) + mem_pat]
            if hi < lo:
                inversions += 1
            taus.append(threshold_from_means(hi, lo))
        taus = np.asarray(taus)
        if np.any(np.diff(taus) < 0):
            inversions += 1
            taus = np.sort(taus)
        thresholds[mem_pat] = taus
    return ThresholdTable(
        thresholds=thresholds,
        memory=memory,
        levels=levels,
        inversions=inversions,
    )


def detect_sequential(counts: np.ndarray, tt: ThresholdTable) -> np.ndarray:
    """Symbol-by-symbol threshold detection with decision feedback.

    Thresholds are looked up under the previously *estimated* symbols
    (zeros before the sequence starts); a count equal to a threshold decides
    for the lower level.
    """
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    return kernels.sequential_detect(
        counts, tt.as_array(), tt.memory, tt.levels
    )


def viterbi_ml_detect(
    counts: np.ndarray, c: ChannelCoefficients, levels: int = 2
) -> np.ndarray:
    """Maximum-likelihood sequence detection with known coefficients.

    Dynamic programming over all ``levels**L`` symbol histories with the
    Poisson log-likelihood as the path metric; starts from the all-zero
    history, ties resolve toward the lower predecessor index.
    """
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    L = c.memory
    amps = np.arange(levels) / (levels - 1)
    if L == 0:
        means = c.noise_mean + amps * c.coeffs[0]
        log_means = np.where(means > 0, np.log(np.maximum(means, 1e-300)), 0.0)
        cost = means[None, :] - counts[:, None] * log_means[None, :]
        # A zero mean only explains a zero count.
        zero = means <= 0
        if zero.any():
            cost[:, zero] = np.where(counts[:, None] == 0, 0.0, np.inf)
        return cost.argmin(axis=1).astype(np.int64)

    n_states = levels**L
    states = np.arange(n_states)
    digits = np.stack(
        [(states // levels**j) % levels for j in range(L)], axis=1
    )
    isi = digits / (levels - 1) @ c.coeffs[1:]
    means = c.noise_mean + amps[None, :] * c.coeffs[0] + isi[:, None]
    log_means = np.where(means > 0, np.log(np.maximum(means, 1e-300)), 0.0)
    return kernels.viterbi_decode(counts, means, log_means, levels)
