"""Label-carrying K-means over windows of received counts.

Observation vectors are sliding windows ordered newest first,
``[r_n, r_{n-1}, ..., r_{n-m}]``, and every centroid carries the symbol
pattern ``[s_i, ..., s_{i-m}]`` it represents. Labels survive clustering
positionally, which is what lets the final centroids be read back as
estimated conditional means.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from mcdet import kernels
from mcdet.channel import ChannelCoefficients
from mcdet.detection import mean_count

MAX_ITERATIONS = 300


@dataclass(frozen=True)
class ObservationVector:
    """One window [r_n, ..., r_{n-m}] anchored at count index n."""

    values: np.ndarray
    anchor_index: int

    def __post_init__(self):
        if self.anchor_index < len(self.values) - 1:
            raise ValueError("anchor precedes a full window")


@dataclass(frozen=True)
class LabeledCentroids:
    """Centroid positions plus their symbol-pattern labels, in step.

    positions : (n_clusters, dim) float array
    labels : tuple of dim-length level tuples, unique
    """

    positions: np.ndarray
    labels: tuple

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2:
            raise ValueError("positions must be a 2-D array")
        if len(self.labels) != pos.shape[0]:
            raise ValueError("one label per centroid required")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        for lab in self.labels:
            if len(lab) != pos.shape[1]:
                raise ValueError("label length must match centroid dimension")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "labels", tuple(tuple(l) for l in self.labels))

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    def __len__(self) -> int:
        return self.positions.shape[0]

    def label_index(self, label: tuple) -> int:
        return self.labels.index(tuple(label))


@dataclass(frozen=True)
class ClusteringResult:
    """Final centroids, per-vector cluster indices, and loop diagnostics.

    wcss_history holds the within-cluster sum of squares recorded at every
    assignment pass; it is nonincreasing.
    """

    centroids: LabeledCentroids
    assignments: np.ndarray
    iterations: int
    wcss_history: np.ndarray


def construct_vectors(counts: np.ndarray, memory: int) -> list:
    """Sliding windows [r_n, ..., r_{n-memory}] for n = memory..K-1.

    Only full windows are formed, so the first ``memory`` counts anchor no
    vector and the list has K - memory entries.
    """
    counts = np.asarray(counts)
    k = counts.shape[0]
    if k <= memory:
        raise ValueError("need more counts than the window memory")
    idx = np.arange(memory, k)[:, None] - np.arange(memory + 1)[None, :]
    windows = counts[idx]
    return [
        ObservationVector(values=windows[i], anchor_index=memory + i)
        for i in range(k - memory)
    ]


def _as_matrix(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        mat = np.asarray(data, dtype=np.float64)
        if mat.ndim == 1:
            mat = mat[:, None]
        return np.ascontiguousarray(mat)
    if len(data) == 0:
        raise ValueError("no observation vectors")
    return np.ascontiguousarray(
        np.stack([np.asarray(v.values, dtype=np.float64) for v in data])
    )


def kmeans(
    data, init: LabeledCentroids, max_iterations: int = MAX_ITERATIONS
) -> ClusteringResult:
    """Lloyd iterations from the given labeled start.

    Alternates nearest-centroid assignment (squared Euclidean, lowest index
    on ties) and mean updates until the assignment vector repeats or the
    iteration cap is hit. Clusters that go empty keep their previous
    position so every label stays represented.
    """
    mat = _as_matrix(data)
    if mat.shape[0] == 0:
        raise ValueError("no observation vectors")
    if mat.shape[1] != init.dim:
        raise ValueError("data and initial centroids disagree on dimension")
    cents, labels, n_assign, wcss = kernels.kmeans_lloyd(
        mat, init.positions.copy(), max_iterations
    )
    # The kernels count assignment passes; an iteration is one
    # update-plus-reassignment cycle after the initial assignment.
    return ClusteringResult(
        centroids=LabeledCentroids(positions=cents, labels=init.labels),
        assignments=labels,
        iterations=n_assign - 1,
        wcss_history=np.asarray(wcss),
    )


def initial_centroids_max(
    counts: np.ndarray, memory: int, levels: int = 2
) -> LabeledCentroids:
    """Corner initialization scaled by the largest observed count.

    The centroid labeled [s_i, ..., s_{i-memory}] sits at coordinate j equal
    to s_{i-j} * max(counts) / (levels - 1).
    """
    counts = np.asarray(counts)
    if counts.size == 0:
        raise ValueError("counts must be nonempty")
    peak = float(counts.max())
    labels = tuple(product(range(levels), repeat=memory + 1))
    positions = np.array(labels, dtype=float) * peak / (levels - 1)
    return LabeledCentroids(positions=positions, labels=labels)


def bootstrap_centroids(prev: LabeledCentroids) -> LabeledCentroids:
    """Grow an l-dimensional centroid set to dimension l+1.

    The new centroid labeled [s_i, ..., s_{i-l}] takes its first coordinate
    from the first coordinate of the previous centroid labeled
    [s_i, ..., s_{i-l+1}] and its remaining coordinates from the whole
    previous centroid labeled [s_{i-1}, ..., s_{i-l}].
    """
    dim = prev.dim
    levels = max(max(lab) for lab in prev.labels) + 1
    if len(prev) != levels**dim:
        raise ValueError("previous centroid set does not cover all labels")
    labels = tuple(product(range(levels), repeat=dim + 1))
    positions = np.empty((len(labels), dim + 1))
    for i, lab in enumerate(labels):
        head = prev.positions[prev.label_index(lab[:-1])]
        tail = prev.positions[prev.label_index(lab[1:])]
        positions[i, 0] = head[0]
        positions[i, 1:] = tail
    return LabeledCentroids(positions=positions, labels=labels)


def iterative_clustering(
    counts: np.ndarray,
    memory: int,
    levels: int = 2,
    max_iterations: int = MAX_ITERATIONS,
) -> ClusteringResult:
    """Dimension-by-dimension clustering with bootstrapped starts.

    Runs 1-D clustering from the max-count corners, then repeatedly lifts
    the converged centroids one dimension and reclusters, up to the full
    memory+1 window. Returns the final full-dimension result.
    """
    counts = np.asarray(counts)
    result = None
    for mem in range(memory + 1):
        if result is None:
            init = initial_centroids_max(counts, 0, levels)
        else:
            init = bootstrap_centroids(result.centroids)
        data = construct_vectors(counts, mem)
        result = kmeans(data, init, max_iterations)
    return result


def theoretical_centroids(
    c: ChannelCoefficients, memory: int, levels: int = 2
) -> LabeledCentroids:
    """Exact conditional-mean centroids for known coefficients.

    Coordinate j of the centroid labeled p is the mean count under the
    pattern p[j:], i.e. conditioning only on the symbols at or before the
    coordinate's own slot.
    """
    labels = tuple(product(range(levels), repeat=memory + 1))
    positions = np.empty((len(labels), memory + 1))
    for i, lab in enumerate(labels):
        for j in range(memory + 1):
            positions[i, j] = mean_count(lab[j:], c, levels)
    return LabeledCentroids(positions=positions, labels=labels)


def centroid_distance(a: LabeledCentroids, b: LabeledCentroids) -> float:
    """Mean Euclidean distance between same-labeled centroids."""
    if set(a.labels) != set(b.labels):
        raise ValueError("centroid sets carry different labels")
    order = [b.label_index(lab) for lab in a.labels]
    diff = a.positions - b.positions[order]
    return float(np.sqrt((diff * diff).sum(axis=1)).mean())
