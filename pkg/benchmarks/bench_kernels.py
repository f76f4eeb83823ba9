"""Benchmark the compiled kernels against the NumPy fallback.

Runs the same workloads through ``mcdet.kernels._ckernels`` and
``mcdet.kernels._pykernels`` and reports the best-of-N wall time for each.
The workloads mirror the heavy operating points of the test suite: a
severe-ISI clustering problem, a long decision-feedback sweep, and a
full-memory trellis search.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from mcdet.channel import channel_coefficients, ntx_from_snr
from mcdet.clustering import construct_vectors, initial_centroids_max
from mcdet.detection import build_threshold_table, exact_mean_table
from mcdet.harness import default_channel, simulate_cell
from mcdet.kernels import _pykernels

try:
    from mcdet.kernels import _ckernels
except ImportError:
    _ckernels = None


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def _workloads():
    p20 = default_channel(20)
    p30 = default_channel(30)
    _, counts, _ = simulate_cell(p20, 30.0, 4096, 2, 0)
    data = np.array([v.values for v in construct_vectors(counts, 4)])
    init = initial_centroids_max(counts, 4, 2).positions

    c30 = channel_coefficients(p30, ntx_from_snr(25.0, p30))
    tt = build_threshold_table(exact_mean_table(c30, 4, 2))
    _, long_counts, _ = simulate_cell(p30, 25.0, 32768, 2, 1)

    L = c30.memory
    states = np.arange(2**L)
    digits = np.stack([(states >> j) & 1 for j in range(L)], axis=1)
    isi = digits.astype(float) @ c30.coeffs[1:]
    means = c30.noise_mean + np.arange(2)[None, :] * c30.coeffs[0] + isi[:, None]
    log_means = np.log(means)
    _, vit_counts, _ = simulate_cell(p30, 25.0, 4096, 2, 2)

    return [
        (
            "kmeans_lloyd (4092x5, k=32)",
            lambda m: m.kmeans_lloyd(data, init, 300),
        ),
        (
            "sequential_detect (n=32768, mem 4)",
            lambda m: m.sequential_detect(long_counts, tt.as_array(), 4, 2),
        ),
        (
            "viterbi_decode (n=4096, 32 states)",
            lambda m: m.viterbi_decode(vit_counts, means, log_means, 2),
        ),
    ]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="best-of repeats")
    args = ap.parse_args(argv)

    if _ckernels is None:
        print("compiled backend not available; timing the fallback only")
    header = f"{'workload':<36} {'cython':>10} {'python':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, call in _workloads():
        t_py = _best_of(lambda: call(_pykernels), args.repeat)
        if _ckernels is not None:
            t_cy = _best_of(lambda: call(_ckernels), args.repeat)
            print(
                f"{name:<36} {t_cy * 1e3:>8.2f}ms {t_py * 1e3:>8.2f}ms "
                f"{t_py / t_cy:>7.1f}x"
            )
        else:
            print(f"{name:<36} {'-':>10} {t_py * 1e3:>8.2f}ms {'-':>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
