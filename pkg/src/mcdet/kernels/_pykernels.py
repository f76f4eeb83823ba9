"""NumPy fallback implementations of the hot inner loops.

These mirror the compiled kernels in ``_ckernels.pyx`` operation for
operation: same tie-breaking (lowest index wins on equal distances/metrics),
same accumulation order, same convergence rule. The parity test suite holds
the two backends to identical integer outputs.
"""

from __future__ import annotations

import numpy as np


def kmeans_lloyd(data, centroids, max_iter):
    """Lloyd iterations with frozen empty clusters.

    Parameters
    ----------
    data : (N, d) float64 array
    centroids : (K, d) float64 array, consumed as the initial positions
    max_iter : int
        Cap on assignment passes; iteration stops earlier once the
        assignment vector repeats.

    Returns
    -------
    (centroids, labels, n_assign, wcss_history)
        Final centroid positions, per-point cluster indices, number of
        assignment passes executed, and the within-cluster sum of squares
        recorded at each assignment pass (nonincreasing).
    """
    data = np.ascontiguousarray(data, dtype=np.float64)
    cents = np.array(centroids, dtype=np.float64, copy=True)
    n_clusters = cents.shape[0]
    wcss_history = []

    labels, wcss = _assign(data, cents)
    wcss_history.append(wcss)
    n_assign = 1
    while n_assign < max_iter:
        cents = _update(data, labels, cents, n_clusters)
        new_labels, wcss = _assign(data, cents)
        wcss_history.append(wcss)
        n_assign += 1
        if np.array_equal(new_labels, labels):
            labels = new_labels
            break
        labels = new_labels
    return cents, labels, n_assign, np.array(wcss_history)


def _assign(data, cents):
    # Direct differences (not the expansion trick) so distances round the
    # same way as the compiled kernel; argmin keeps the lowest index on ties.
    diff = data[:, None, :] - cents[None, :, :]
    dist = (diff * diff).sum(axis=-1)
    labels = dist.argmin(axis=1).astype(np.int64)
    wcss = float(dist[np.arange(data.shape[0]), labels].sum())
    return labels, wcss


def _update(data, labels, cents, n_clusters):
    sums = np.zeros((n_clusters, data.shape[1]))
    np.add.at(sums, labels, data)
    counts = np.bincount(labels, minlength=n_clusters)
    new = cents.copy()
    filled = counts > 0
    new[filled] = sums[filled] / counts[filled, None]
    return new


def sequential_detect(counts, thresholds, memory, levels):
    """Left-to-right threshold detection with decision feedback.

    ``thresholds`` is a (levels**memory, levels-1) array; row q holds the
    sorted thresholds for the feedback pattern encoded base-``levels`` with
    the most recent decision in the least significant digit. Pre-sequence
    decisions are 0. A count equal to a threshold stays at the lower level.
    """
    counts = np.asarray(counts)
    thresholds = np.asarray(thresholds, dtype=np.float64)
    out = np.zeros(counts.size, dtype=np.int64)
    pattern = 0
    wrap = levels ** (memory - 1) if memory > 0 else 1
    for i in range(counts.size):
        row = thresholds[pattern]
        s = 0
        r = counts[i]
        for tau in row:
            if r > tau:
                s += 1
            else:
                break
        out[i] = s
        if memory > 0:
            pattern = s + levels * (pattern % wrap)
    return out


def viterbi_decode(counts, means, log_means, levels):
    """Min-sum Viterbi pass over the full-memory Poisson trellis.

    ``means[p, s]`` is the received mean when the history state is p (base-
    ``levels`` encoding, most recent symbol in the least significant digit)
    and symbol s is emitted; ``log_means`` its elementwise log with zero
    substituted where the mean is zero. The branch cost is
    ``mean - r * log(mean)`` (the Poisson negative log-likelihood without
    the r! term, which is constant per step). Ties keep the lowest
    predecessor index. Starts from the all-zero history state.
    """
    counts = np.asarray(counts)
    means = np.asarray(means, dtype=np.float64)
    log_means = np.asarray(log_means, dtype=np.float64)
    n_states = means.shape[0]
    n_steps = counts.size
    stride = n_states // levels

    # pred[q, k]: k-th predecessor of state q; emit[q]: symbol entering q.
    prefix = np.arange(n_states) // levels
    pred = prefix[:, None] + np.arange(levels)[None, :] * stride
    emit = np.arange(n_states) % levels

    metric = np.full(n_states, np.inf)
    metric[0] = 0.0
    back = np.zeros((n_steps, n_states), dtype=np.int64)
    for i in range(n_steps):
        r = counts[i]
        cost = means - r * log_means
        cost[means <= 0] = np.where(r == 0, 0.0, np.inf)
        cand = metric[pred] + cost[pred, emit[:, None]]
        k = cand.argmin(axis=1)
        metric = cand[np.arange(n_states), k]
        back[i] = k

    symbols = np.zeros(n_steps, dtype=np.int64)
    state = int(metric.argmin())
    for i in range(n_steps - 1, -1, -1):
        symbols[i] = state % levels
        state = state // levels + back[i, state] * stride
    return symbols
