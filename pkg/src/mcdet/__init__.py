"""Simulator and detectors for diffusive molecular communication.

Received counts follow a Poisson law whose mean mixes the current symbol,
residual particles from previous slots, and background noise. The package
provides the channel model, clustering-based non-coherent detectors,
CSI-aided baselines, and a Monte Carlo error-rate harness.
"""

from mcdet.channel import (
    ChannelCoefficients,
    ChannelParams,
    channel_coefficients,
    hitting_rate,
    level_amplitudes,
    ntx_from_snr,
    received_mean,
    simulate_reception,
    slot_hit_probability,
    snr_from_ntx,
)
from mcdet.clustering import (
    ClusteringResult,
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
from mcdet.detection import (
    MeanTable,
    ThresholdTable,
    build_threshold_table,
    detect_sequential,
    exact_marginal_pmf,
    exact_mean_table,
    mean_count,
    poisson_pmf,
    threshold_from_means,
    viterbi_ml_detect,
)
from mcdet.harness import (
    BerRecord,
    ExperimentConfig,
    ExperimentResult,
    aggregate_records,
    default_channel,
    run_cell,
    run_experiment,
    simulate_cell,
)
from mcdet.pipelines import (
    DetectorResult,
    DetectorSpec,
    detect_alg1,
    detect_alg2,
    detect_alg3,
    detect_alg4,
    detect_genie,
    estimate_channel_pilot,
    run_detector,
)

__version__ = "0.1.0"

__all__ = [
    "BerRecord",
    "ChannelCoefficients",
    "ChannelParams",
    "ClusteringResult",
    "DetectorResult",
    "DetectorSpec",
    "ExperimentConfig",
    "ExperimentResult",
    "LabeledCentroids",
    "MeanTable",
    "ObservationVector",
    "ThresholdTable",
    "aggregate_records",
    "bootstrap_centroids",
    "build_threshold_table",
    "centroid_distance",
    "channel_coefficients",
    "construct_vectors",
    "default_channel",
    "detect_alg1",
    "detect_alg2",
    "detect_alg3",
    "detect_alg4",
    "detect_genie",
    "detect_sequential",
    "estimate_channel_pilot",
    "exact_marginal_pmf",
    "exact_mean_table",
    "hitting_rate",
    "initial_centroids_max",
    "iterative_clustering",
    "kmeans",
    "level_amplitudes",
    "mean_count",
    "ntx_from_snr",
    "poisson_pmf",
    "received_mean",
    "run_cell",
    "run_detector",
    "run_experiment",
    "simulate_cell",
    "simulate_reception",
    "slot_hit_probability",
    "snr_from_ntx",
    "theoretical_centroids",
    "threshold_from_means",
    "viterbi_ml_detect",
]
