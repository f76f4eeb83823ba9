# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Lloyd iterations, feedback detection, Viterbi pass.

Kept operation-for-operation equivalent to ``_pykernels`` (tie-breaking,
accumulation order, convergence rule); the parity tests compare the two.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def kmeans_lloyd(data, centroids, int max_iter):
    """Lloyd iterations with frozen empty clusters; see _pykernels for docs."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] x = \
        np.ascontiguousarray(data, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] cents = \
        np.array(centroids, dtype=np.float64, copy=True, order="C")
    cdef Py_ssize_t n = x.shape[0], d = x.shape[1], K = cents.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] labels = np.zeros(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] prev = np.empty(n, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] sums = np.zeros((K, d))
    cdef cnp.ndarray[cnp.int64_t, ndim=1] counts = np.zeros(K, dtype=np.int64)
    cdef Py_ssize_t i, j, k, best
    cdef double dist, best_dist, diff, wcss
    cdef int n_assign = 0
    cdef bint same
    wcss_history = []

    while True:
        # assignment pass
        wcss = 0.0
        for i in range(n):
            best = 0
            best_dist = 0.0
            for j in range(d):
                diff = x[i, j] - cents[0, j]
                best_dist += diff * diff
            for k in range(1, K):
                dist = 0.0
                for j in range(d):
                    diff = x[i, j] - cents[k, j]
                    dist += diff * diff
                if dist < best_dist:
                    best_dist = dist
                    best = k
            prev[i] = labels[i]
            labels[i] = best
            wcss += best_dist
        n_assign += 1
        wcss_history.append(wcss)

        if n_assign > 1:
            same = True
            for i in range(n):
                if labels[i] != prev[i]:
                    same = False
                    break
            if same:
                break
        if n_assign >= max_iter:
            break

        # update pass; empty clusters keep their previous position
        for k in range(K):
            counts[k] = 0
            for j in range(d):
                sums[k, j] = 0.0
        for i in range(n):
            k = labels[i]
            counts[k] += 1
            for j in range(d):
                sums[k, j] += x[i, j]
        for k in range(K):
            if counts[k] > 0:
                for j in range(d):
                    cents[k, j] = sums[k, j] / counts[k]

    return cents, labels, n_assign, np.array(wcss_history)


def sequential_detect(counts, thresholds, int memory, int levels):
    """Decision-feedback threshold pass; see _pykernels for docs."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] r = \
        np.ascontiguousarray(counts, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] tau = \
        np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef Py_ssize_t n = r.shape[0], n_thresh = tau.shape[1]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(n, dtype=np.int64)
    cdef Py_ssize_t i, t
    cdef long long pattern = 0, wrap = 1, s
    cdef int m
    if memory > 0:
        for m in range(memory - 1):
            wrap *= levels
    for i in range(n):
        s = 0
        for t in range(n_thresh):
            if r[i] > tau[pattern, t]:
                s += 1
            else:
                break
        out[i] = s
        if memory > 0:
            pattern = s + levels * (pattern % wrap)
    return out


def viterbi_decode(counts, means, log_means, int levels):
    """Min-sum Viterbi over the Poisson trellis; see _pykernels for docs."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] r = \
        np.ascontiguousarray(counts, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] mu = \
        np.ascontiguousarray(means, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] logmu = \
        np.ascontiguousarray(log_means, dtype=np.float64)
    cdef Py_ssize_t n_states = mu.shape[0], n_steps = r.shape[0]
    cdef Py_ssize_t stride = n_states // levels
    cdef cnp.ndarray[cnp.float64_t, ndim=1] metric = \
        np.full(n_states, np.inf)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] new_metric = np.empty(n_states)
    cdef cnp.ndarray[cnp.int64_t, ndim=2, mode="c"] back = \
        np.zeros((n_steps, n_states), dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] symbols = \
        np.zeros(n_steps, dtype=np.int64)
    cdef Py_ssize_t i, q, k, p, sym, best_k, state
    cdef double cost, cand, best
    cdef long long ri
    metric[0] = 0.0

    for i in range(n_steps):
        ri = r[i]
        for q in range(n_states):
            sym = q % levels
            best = INFINITY
            best_k = 0
            for k in range(levels):
                p = q // levels + k * stride
                if mu[p, sym] <= 0.0:
                    cost = 0.0 if ri == 0 else INFINITY
                else:
                    cost = mu[p, sym] - ri * logmu[p, sym]
                cand = metric[p] + cost
                if cand < best:
                    best = cand
                    best_k = k
            new_metric[q] = best
            back[i, q] = best_k
        metric[:] = new_metric

    state = 0
    best = metric[0]
    for q in range(1, n_states):
        if metric[q] < best:
            best = metric[q]
            state = q
    for i in range(n_steps - 1, -1, -1):
        symbols[i] = state % levels
        state = state // levels + back[i, state] * stride
    return symbols
