"""End-to-end detectors: clustering pipelines and CSI baselines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mcdet.channel import ChannelCoefficients, level_amplitudes
from mcdet.clustering import (
    ClusteringResult,
    construct_vectors,
    initial_centroids_max,
    iterative_clustering,
    kmeans,
)
from mcdet.detection import (
    MeanTable,
    build_threshold_table,
    detect_sequential,
    exact_mean_table,
    viterbi_ml_detect,
)

VALID_KINDS = (
    "direct_cluster",
    "cluster_threshold",
    "iter_cluster",
    "iter_cluster_threshold",
    "genie_threshold",
    "pilot_ce_threshold",
    "viterbi_ml",
)

# Short names accepted anywhere a detector kind is given.
KIND_ALIASES = {
    "alg1": "direct_cluster",
    "alg2": "cluster_threshold",
    "alg3": "iter_cluster",
    "alg4": "iter_cluster_threshold",
    "genie": "genie_threshold",
    "pilot": "pilot_ce_threshold",
    "viterbi": "viterbi_ml",
}


def canonical_kind(name: str) -> str:
    kind = KIND_ALIASES.get(name, name)
    if kind not in VALID_KINDS:
        valid = ", ".join(list(VALID_KINDS) + sorted(KIND_ALIASES))
        raise ValueError(f"unknown detector {name!r}; valid names: {valid}")
    return kind


@dataclass(frozen=True)
class DetectorSpec:
    """Which detector to run and with what knobs."""

    kind: str
    memory: int = 1
    levels: int = 2
    pilot_length: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        if self.memory < 0:
            raise ValueError("memory must be nonnegative")
        if self.levels < 2:
            raise ValueError("levels must be at least 2")
        if self.kind == "pilot_ce_threshold":
            if self.pilot_length is None or self.pilot_length <= 0:
                raise ValueError(
                    "pilot_ce_threshold requires a positive pilot_length"
                )


@dataclass(frozen=True)
class DetectorResult:
    """Detected symbols plus pipeline diagnostics.

    clustering is None for detectors that never cluster; kmeans_iterations
    counts the final clustering stage's assignment passes.
    """

    symbols: np.ndarray
    kind: str
    kmeans_iterations: int = 0
    threshold_inversions: int = 0
    clustering: ClusteringResult | None = None


def _infer_from_labels(
    result: ClusteringResult, n_counts: int, memory: int
) -> np.ndarray:
    """Read each symbol off the first label component of its own window.

    Symbols too early to anchor a full window default to level 0.
    """
    first = np.array([lab[0] for lab in result.centroids.labels], dtype=np.int64)
    out = np.zeros(n_counts, dtype=np.int64)
    out[memory:] = first[result.assignments]
    return out


def _centroid_mean_table(result: ClusteringResult, memory: int, levels: int) -> MeanTable:
    """Pattern-conditioned means read off estimated centroids.

    The mean for pattern p is the first coordinate of the centroid labeled
    p: the estimated average count in the most recent slot of that window.
    """
    cents = result.centroids
    means = {lab: float(cents.positions[i, 0]) for i, lab in enumerate(cents.labels)}
    return MeanTable(means=means, memory=memory, levels=levels)


def detect_alg1(counts: np.ndarray, memory: int, levels: int = 2) -> DetectorResult:
    """Direct clustering inference from max-count corner initialization."""
    counts = np.asarray(counts)
    init = initial_centroids_max(counts, memory, levels)
    result = kmeans(construct_vectors(counts, memory), init)
    return DetectorResult(
        symbols=_infer_from_labels(result, counts.shape[0], memory),
        kind="direct_cluster",
        kmeans_iterations=result.iterations,
        clustering=result,
    )


def detect_alg2(counts: np.ndarray, memory: int, levels: int = 2) -> DetectorResult:
    """Clustering-plus-threshold detection from corner initialization."""
    counts = np.asarray(counts)
    init = initial_centroids_max(counts, memory, levels)
    result = kmeans(construct_vectors(counts, memory), init)
    tt = build_threshold_table(_centroid_mean_table(result, memory, levels))
    return DetectorResult(
        symbols=detect_sequential(counts, tt),
        kind="cluster_threshold",
        kmeans_iterations=result.iterations,
        threshold_inversions=tt.inversions,
        clustering=result,
    )


def detect_alg3(counts: np.ndarray, memory: int, levels: int = 2) -> DetectorResult:
    """Direct inference after dimension-bootstrapped iterative clustering."""
    counts = np.asarray(counts)
    result = iterative_clustering(counts, memory, levels)
    return DetectorResult(
        symbols=_infer_from_labels(result, counts.shape[0], memory),
        kind="iter_cluster",
        kmeans_iterations=result.iterations,
        clustering=result,
    )


def detect_alg4(counts: np.ndarray, memory: int, levels: int = 2) -> DetectorResult:
    """Threshold detection with iteratively clustered centroids."""
    counts = np.asarray(counts)
    result = iterative_clustering(counts, memory, levels)
    tt = build_threshold_table(_centroid_mean_table(result, memory, levels))
    return DetectorResult(
        symbols=detect_sequential(counts, tt),
        kind="iter_cluster_threshold",
        kmeans_iterations=result.iterations,
        threshold_inversions=tt.inversions,
        clustering=result,
    )


def detect_genie(
    counts: np.ndarray, c: ChannelCoefficients, memory: int, levels: int = 2
) -> DetectorResult:
    """Threshold detection from exact pattern means (known CSI)."""
    counts = np.asarray(counts)
    tt = build_threshold_table(exact_mean_table(c, memory, levels))
    return DetectorResult(
        symbols=detect_sequential(counts, tt),
        kind="genie_threshold",
        threshold_inversions=tt.inversions,
    )


def estimate_channel_pilot(
    counts: np.ndarray,
    pilots: np.ndarray,
    channel_memory: int,
    levels: int = 2,
) -> ChannelCoefficients:
    """Least-squares channel estimate from a known pilot block.

    Fits counts to an intercept (noise mean) plus the current and
    channel_memory previous pilot amplitudes via the normal equations.
    Symbols before the block are taken as absent (amplitude 0). Negative
    estimates are clamped to zero.
    """
    counts = np.asarray(counts, dtype=float)
    pilots = np.asarray(pilots)
    if counts.shape[0] != pilots.shape[0]:
        raise ValueError("counts and pilots must have equal length")
    k = pilots.shape[0]
    if k <= channel_memory + 1:
        raise ValueError("pilot block shorter than the model order")
    amps = level_amplitudes(levels)[pilots]
    design = np.ones((k, channel_memory + 2))
    for j in range(channel_memory + 1):
        design[:j, j + 1] = 0.0
        design[j:, j + 1] = amps[: k - j]
    gram = design.T @ design
    if np.linalg.matrix_rank(gram) < gram.shape[0]:
        raise ValueError("pilot sequence is ill-conditioned for estimation")
    beta = np.linalg.solve(gram, design.T @ counts)
    beta = np.maximum(beta, 0.0)
    return ChannelCoefficients(coeffs=beta[1:], noise_mean=float(beta[0]))


def detect_pilot_ce(
    counts: np.ndarray,
    pilot_counts: np.ndarray,
    pilot_symbols: np.ndarray,
    channel_memory: int,
    memory: int,
    levels: int = 2,
) -> DetectorResult:
    """Threshold detection from pilot-estimated channel coefficients."""
    est = estimate_channel_pilot(
        pilot_counts, pilot_symbols, channel_memory, levels
    )
    tt = build_threshold_table(exact_mean_table(est, memory, levels))
    return DetectorResult(
        symbols=detect_sequential(np.asarray(counts), tt),
        kind="pilot_ce_threshold",
        threshold_inversions=tt.inversions,
    )


def run_detector(
    counts: np.ndarray,
    spec: DetectorSpec,
    c: ChannelCoefficients | None = None,
    pilot_counts: np.ndarray | None = None,
    pilot_symbols: np.ndarray | None = None,
) -> DetectorResult:
    """Dispatch one detector run.

    c is required for the CSI detectors (genie_threshold, viterbi_ml) and
    for sizing the pilot estimator's model order; the clustering detectors
    ignore it.
    """
    kind = spec.kind
    if kind == "direct_cluster":
        return detect_alg1(counts, spec.memory, spec.levels)
    if kind == "cluster_threshold":
        return detect_alg2(counts, spec.memory, spec.levels)
    if kind == "iter_cluster":
        return detect_alg3(counts, spec.memory, spec.levels)
    if kind == "iter_cluster_threshold":
        return detect_alg4(counts, spec.memory, spec.levels)
    if c is None:
        raise ValueError(f"{kind} requires channel coefficients")
    if kind == "genie_threshold":
        return detect_genie(counts, c, spec.memory, spec.levels)
    if kind == "viterbi_ml":
        return DetectorResult(
            symbols=viterbi_ml_detect(counts, c, spec.levels),
            kind="viterbi_ml",
        )
    if pilot_counts is None or pilot_symbols is None:
        raise ValueError("pilot_ce_threshold requires a pilot block")
    return detect_pilot_ce(
        counts, pilot_counts, pilot_symbols, c.memory, spec.memory, spec.levels
    )
