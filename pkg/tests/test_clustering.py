"""Clustering tests: windows, labeled K-means, bootstrapped initialization."""

from itertools import product

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mcdet import kernels
from mcdet.channel import ChannelCoefficients, channel_coefficients, ntx_from_snr
from mcdet.clustering import (
    LabeledCentroids,
    ObservationVector,
    bootstrap_centroids,
    centroid_distance,
    construct_vectors,
    initial_centroids_max,
    iterative_clustering,
    kmeans,
    theoretical_centroids,
)
from mcdet.detection import mean_count
from mcdet.harness import default_channel, simulate_cell


def _binary_pair():
    return LabeledCentroids(
        positions=np.array([[0.0], [10.0]]), labels=((0,), (1,))
    )


# ----------------------------------------------------------- window building


def test_construct_vectors_examples():
    vecs = construct_vectors(np.array([5, 7, 9]), 1)
    assert [v.values.tolist() for v in vecs] == [[7, 5], [9, 7]]
    assert [v.anchor_index for v in vecs] == [1, 2]


def test_construct_vectors_memory_zero_is_identity():
    vecs = construct_vectors(np.array([3, 1, 4]), 0)
    assert [v.values.tolist() for v in vecs] == [[3], [1], [4]]


def test_construct_vectors_full_window_boundary():
    vecs = construct_vectors(np.array([1, 2, 3, 4]), 3)
    assert len(vecs) == 1
    assert vecs[0].values.tolist() == [4, 3, 2, 1]


def test_construct_vectors_needs_enough_counts():
    with pytest.raises(ValueError):
        construct_vectors(np.array([1, 2]), 2)


def test_observation_vector_anchor_check():
    with pytest.raises(ValueError):
        ObservationVector(values=np.array([1.0, 2.0]), anchor_index=0)


# ------------------------------------------------------------------- k-means


def test_kmeans_fixed_point_converges_in_one_iteration():
    data = np.array([[0.0], [10.0]])
    res = kmeans(data, _binary_pair())
    assert res.iterations == 1
    assert_allclose(res.centroids.positions, [[0.0], [10.0]])
    assert res.assignments.tolist() == [0, 1]


def test_kmeans_one_dimensional_split():
    data = np.array([0.0, 0.0, 10.0, 10.0])
    res = kmeans(data, _binary_pair())
    assert_allclose(res.centroids.positions, [[0.0], [10.0]])
    assert np.bincount(res.assignments).tolist() == [2, 2]


def test_kmeans_label_conservation():
    rng = np.random.default_rng(8)
    data = rng.normal(size=(60, 2))
    init = LabeledCentroids(
        positions=rng.normal(size=(4, 2)),
        labels=((0, 0), (0, 1), (1, 0), (1, 1)),
    )
    res = kmeans(data, init)
    assert res.centroids.labels == init.labels


def test_kmeans_wcss_monotone_many_trials():
    rng = np.random.default_rng(123)
    for _ in range(50):
        n = int(rng.integers(20, 200))
        d = int(rng.integers(1, 5))
        k = int(rng.integers(2, 6))
        data = rng.normal(scale=rng.uniform(0.5, 4.0), size=(n, d))
        init = LabeledCentroids(
            positions=rng.normal(size=(k, d)),
            labels=tuple((i,) * d for i in range(k)),
        )
        res = kmeans(data, init)
        assert np.all(np.diff(res.wcss_history) <= 1e-9)
        assert res.iterations <= 300


def test_kmeans_assignment_consistency():
    rng = np.random.default_rng(55)
    data = rng.poisson(6.0, size=(300, 2)).astype(float)
    init = LabeledCentroids(
        positions=np.array([[0.0, 0.0], [0.0, 12.0], [12.0, 0.0], [12.0, 12.0]]),
        labels=((0, 0), (0, 1), (1, 0), (1, 1)),
    )
    res = kmeans(data, init)
    # One assignment pass from the final centroids must reproduce the
    # stored assignment vector.
    _, labels, _, _ = kernels.kmeans_lloyd(data, res.centroids.positions, 1)
    assert np.array_equal(labels, res.assignments)


def test_kmeans_empty_cluster_keeps_position():
    data = np.array([[0.0], [1.0], [9.0], [10.0]])
    init = LabeledCentroids(
        positions=np.array([[0.0], [10.0], [100.0]]),
        labels=((0,), (1,), (2,)),
    )
    res = kmeans(data, init)
    assert res.centroids.positions[2, 0] == 100.0
    assert set(res.assignments.tolist()) == {0, 1}


def test_kmeans_validates_inputs():
    with pytest.raises(ValueError):
        kmeans([], _binary_pair())
    with pytest.raises(ValueError):
        kmeans(np.zeros((4, 2)), _binary_pair())  # dimension mismatch


def test_labeled_centroids_validation():
    with pytest.raises(ValueError):
        LabeledCentroids(positions=np.zeros((2, 1)), labels=((0,), (0,)))
    with pytest.raises(ValueError):
        LabeledCentroids(positions=np.zeros((2, 1)), labels=((0,),))
    with pytest.raises(ValueError):
        LabeledCentroids(positions=np.zeros((2, 1)), labels=((0, 1), (1, 1)))


# ------------------------------------------------------------ initialization


def test_initial_centroids_max_binary_one_bit():
    cents = initial_centroids_max(np.array([12, 40, 7]), 1)
    want = {
        (0, 0): [0.0, 0.0],
        (0, 1): [0.0, 40.0],
        (1, 0): [40.0, 0.0],
        (1, 1): [40.0, 40.0],
    }
    for lab, pos in want.items():
        assert cents.positions[cents.label_index(lab)].tolist() == pos


def test_initial_centroids_max_two_bits():
    cents = initial_centroids_max(np.array([3, 9]), 2)
    assert len(cents) == 8
    assert cents.positions[cents.label_index((0, 1, 1))].tolist() == [0.0, 9.0, 9.0]


def test_initial_centroids_max_four_levels():
    cents = initial_centroids_max(np.array([30]), 0, levels=4)
    assert_allclose(cents.positions[:, 0], [0.0, 10.0, 20.0, 30.0])


def test_initial_centroids_max_empty_counts():
    with pytest.raises(ValueError):
        initial_centroids_max(np.array([]), 1)


def test_bootstrap_centroids_scalar_to_pairs():
    prev = LabeledCentroids(positions=np.array([[2.5], [6.5]]), labels=((0,), (1,)))
    out = bootstrap_centroids(prev)
    want = {
        (0, 0): [2.5, 2.5],
        (0, 1): [2.5, 6.5],
        (1, 0): [6.5, 2.5],
        (1, 1): [6.5, 6.5],
    }
    assert len(out) == 4
    for lab, pos in want.items():
        assert out.positions[out.label_index(lab)].tolist() == pos


def test_bootstrap_centroids_shape_and_labels():
    prev = initial_centroids_max(np.array([6]), 1, levels=3)
    out = bootstrap_centroids(prev)
    assert out.dim == 3
    assert len(out) == 27
    assert len(set(out.labels)) == 27


def test_bootstrap_centroids_requires_complete_set():
    prev = LabeledCentroids(positions=np.array([[1.0]]), labels=((1,),))
    with pytest.raises(ValueError):
        bootstrap_centroids(prev)


def test_bootstrap_of_exact_means_matches_theory_block():
    p = default_channel(30)
    c = channel_coefficients(p, ntx_from_snr(20.0, p))
    out = bootstrap_centroids(theoretical_centroids(c, 0))
    theo = theoretical_centroids(c, 1)
    # Coordinates 1.. of the lifted centroids are exactly the lower-memory
    # theoretical means; coordinate 0 is the memory-0 approximation.
    for lab in out.labels:
        assert_allclose(
            out.positions[out.label_index(lab)][1:],
            theo.positions[theo.label_index(lab)][1:],
            rtol=1e-12,
        )
        assert out.positions[out.label_index(lab)][0] == pytest.approx(
            mean_count((lab[0],), c), rel=1e-12
        )


# ------------------------------------------------------- iterative clustering


def test_iterative_memory_zero_equals_plain_kmeans():
    _, counts, _ = simulate_cell(default_channel(30), 20.0, 1024, 2, 3)
    a = iterative_clustering(counts, 0)
    b = kmeans(construct_vectors(counts, 0), initial_centroids_max(counts, 0))
    assert np.array_equal(a.assignments, b.assignments)
    assert_allclose(a.centroids.positions, b.centroids.positions)
    assert a.centroids.labels == b.centroids.labels


def test_iterative_recovers_separated_centroids():
    c = ChannelCoefficients(coeffs=[100.0, 0.0, 0.0], noise_mean=1.0)
    rng = np.random.default_rng(31)
    symbols = rng.integers(0, 2, size=4096)
    from mcdet.channel import simulate_reception

    counts = simulate_reception(symbols, c, 77)
    res = iterative_clustering(counts, 1)
    theo = theoretical_centroids(c, 1)
    sizes = np.bincount(res.assignments, minlength=4)
    for i, lab in enumerate(res.centroids.labels):
        j = theo.label_index(lab)
        # Poisson standard error of a cluster mean, three sigma.
        se = np.sqrt(theo.positions[j] / max(sizes[i], 1))
        assert np.all(np.abs(res.centroids.positions[i] - theo.positions[j]) <= 3 * se + 1e-9)


def test_iterative_beats_max_init_under_severe_isi():
    p = default_channel(20)
    gains = []
    for seed in range(5):
        _, counts, c = simulate_cell(p, 30.0, 4096, 2, seed)
        theo = theoretical_centroids(c, 4)
        init = initial_centroids_max(counts, 4)
        d_max = centroid_distance(
            kmeans(construct_vectors(counts, 4), init).centroids, theo
        )
        d_iter = centroid_distance(iterative_clustering(counts, 4).centroids, theo)
        gains.append(d_max - d_iter)
    assert np.mean(gains) > 0


# -------------------------------------------------- theoretical centroids etc


def test_theoretical_centroids_coordinates():
    p = default_channel(30)
    c = channel_coefficients(p, ntx_from_snr(20.0, p))
    theo = theoretical_centroids(c, 1)
    for lab in product(range(2), repeat=2):
        pos = theo.positions[theo.label_index(lab)]
        assert pos[0] == pytest.approx(mean_count(lab, c), rel=1e-12)
        assert pos[1] == pytest.approx(mean_count(lab[1:], c), rel=1e-12)


def test_theoretical_centroids_multilevel_shape():
    c = ChannelCoefficients(coeffs=[9.0, 3.0], noise_mean=0.5)
    theo = theoretical_centroids(c, 1, levels=4)
    assert theo.positions.shape == (16, 2)
    assert len(set(theo.labels)) == 16


def test_centroid_distance_label_aware():
    a = LabeledCentroids(positions=np.array([[0.0], [4.0]]), labels=((0,), (1,)))
    b = LabeledCentroids(positions=np.array([[4.0], [0.0]]), labels=((1,), (0,)))
    # Same labeled positions, listed in a different order: distance 0.
    assert centroid_distance(a, b) == 0.0
    c = LabeledCentroids(positions=np.array([[1.0], [5.0]]), labels=((0,), (1,)))
    assert centroid_distance(a, c) == pytest.approx(1.0)
    d = LabeledCentroids(positions=np.array([[0.0], [4.0]]), labels=((2,), (1,)))
    with pytest.raises(ValueError):
        centroid_distance(a, d)
