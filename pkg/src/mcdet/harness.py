"""Monte Carlo BER experiments: cell protocol, aggregation, CSV output.

A cell is one (detector, SNR, seed) combination. Symbol and noise streams
are derived from the cell seed alone, so every detector sees the same data
at the same (SNR, seed): paired comparisons across detectors use common
random numbers.
"""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from mcdet.channel import (
    ChannelCoefficients,
    ChannelParams,
    channel_coefficients,
    ntx_from_snr,
    simulate_reception,
)
from mcdet.clustering import centroid_distance, theoretical_centroids
from mcdet.pipelines import DetectorSpec, run_detector

log = logging.getLogger(__name__)

DELTA_T = 9e-6

CSV_HEADER = (
    "detector,snr_db,seed,errors,bits,ber,"
    "kmeans_iterations,centroid_dist,threshold_inversions"
)


def default_channel(slot_multiplier: int, delta_t: float = DELTA_T) -> ChannelParams:
    """Reference channel geometry with T = slot_multiplier * delta_t."""
    return ChannelParams(
        diffusion_coefficient=4.265e-10,
        receiver_radius=45e-9,
        distance=500e-9,
        noise_rate=100.0,
        slot_duration=slot_multiplier * delta_t,
        channel_memory=5,
    )


@dataclass(frozen=True)
class ExperimentConfig:
    channel: ChannelParams
    slot_multiplier: int
    snr_grid: tuple
    detectors: tuple
    sequence_length: int = 4096
    seeds: tuple = tuple(range(20))
    output_path: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "snr_grid", tuple(float(s) for s in self.snr_grid))
        object.__setattr__(self, "detectors", tuple(self.detectors))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.snr_grid:
            raise ValueError("snr_grid must be nonempty")
        if not self.detectors:
            raise ValueError("at least one detector required")
        if not self.seeds:
            raise ValueError("at least one seed required")
        for det in self.detectors:
            need = 8 * det.levels ** (det.memory + 1)
            if self.sequence_length < need:
                raise ValueError(
                    f"sequence_length {self.sequence_length} too short for "
                    f"{det.kind} with memory {det.memory} (needs >= {need})"
                )


@dataclass(frozen=True)
class BerRecord:
    """One cell's error counts and diagnostics.

    For multi-level runs `errors` counts symbol errors and `ber` is the
    symbol error rate; `seed` is the string "mean" on aggregate rows.
    Diagnostics are 0 / nan where a detector has no clustering stage.
    """

    detector: str
    snr_db: float
    seed: object
    errors: int
    bits: int
    ber: float
    kmeans_iterations: float = 0
    centroid_dist: float = math.nan
    threshold_inversions: float = 0


@dataclass(frozen=True)
class CellFailure:
    detector: str
    snr_db: float
    seed: int
    message: str


def simulate_cell(
    params: ChannelParams,
    snr_db: float,
    length: int,
    levels: int,
    seed: int,
):
    """Draw one cell's symbols and received counts.

    Returns (symbols, counts, coefficients). Streams for symbols and
    reception noise are independent children of the cell seed; children 2
    and 3 are reserved for the pilot block so drawing one never shifts
    another.
    """
    n_tx = ntx_from_snr(snr_db, params)
    c = channel_coefficients(params, n_tx)
    kids = np.random.SeedSequence(seed).spawn(4)
    symbols = np.random.default_rng(kids[0]).integers(
        0, levels, size=length, dtype=np.int64
    )
    counts = simulate_reception(symbols, c, kids[1], levels)
    return symbols, counts, c


def _pilot_block(
    c: ChannelCoefficients,
    levels: int,
    pilot_length: int,
    seed: int,
):
    kids = np.random.SeedSequence(seed).spawn(4)
    pilots = np.random.default_rng(kids[2]).integers(
        0, levels, size=pilot_length, dtype=np.int64
    )
    pilot_counts = simulate_reception(pilots, c, kids[3], levels)
    return pilots, pilot_counts


def run_cell(
    cfg: ExperimentConfig, detector: DetectorSpec, snr_db: float, seed: int
) -> BerRecord:
    """Simulate, detect, and score one cell. Deterministic per (cfg, seed)."""
    symbols, counts, c = simulate_cell(
        cfg.channel, snr_db, cfg.sequence_length, detector.levels, seed
    )
    pilots = pilot_counts = None
    if detector.kind == "pilot_ce_threshold":
        pilots, pilot_counts = _pilot_block(
            c, detector.levels, detector.pilot_length, seed
        )
    result = run_detector(
        counts, detector, c=c, pilot_counts=pilot_counts, pilot_symbols=pilots
    )
    errors = int(np.count_nonzero(result.symbols != symbols))
    dist = math.nan
    if result.clustering is not None:
        dist = centroid_distance(
            result.clustering.centroids,
            theoretical_centroids(c, detector.memory, detector.levels),
        )
    return BerRecord(
        detector=detector.kind,
        snr_db=float(snr_db),
        seed=int(seed),
        errors=errors,
        bits=cfg.sequence_length,
        ber=errors / cfg.sequence_length,
        kmeans_iterations=result.kmeans_iterations,
        centroid_dist=dist,
        threshold_inversions=result.threshold_inversions,
    )


def _cell_task(args):
    cfg, det, snr, seed = args
    try:
        return run_cell(cfg, det, snr, seed)
    except Exception as exc:  # capture per-cell, the sweep continues
        return CellFailure(
            detector=det.kind, snr_db=float(snr), seed=int(seed),
            message=f"{type(exc).__name__}: {exc}",
        )


def aggregate_records(records) -> list:
    """Mean rows per (detector, snr), seed = "mean".

    ber is the arithmetic mean of the per-seed rates; errors and bits are
    totals; diagnostics are averaged (nan-propagating for centroid_dist).
    """
    groups = {}
    for r in records:
        groups.setdefault((r.detector, r.snr_db), []).append(r)
    out = []
    for (det, snr) in sorted(groups):
        grp = groups[(det, snr)]
        out.append(
            BerRecord(
                detector=det,
                snr_db=snr,
                seed="mean",
                errors=sum(r.errors for r in grp),
                bits=sum(r.bits for r in grp),
                ber=float(np.mean([r.ber for r in grp])),
                kmeans_iterations=float(np.mean([r.kmeans_iterations for r in grp])),
                centroid_dist=float(np.mean([r.centroid_dist for r in grp])),
                threshold_inversions=float(
                    np.mean([r.threshold_inversions for r in grp])
                ),
            )
        )
    return out


@dataclass(frozen=True)
class ExperimentResult:
    records: tuple
    aggregates: tuple
    failures: tuple


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    """Cartesian sweep over detectors x snr_grid x seeds.

    Cell failures are captured and reported, not raised. Writes one CSV to
    cfg.output_path when set. Records come back sorted by (detector, snr,
    seed) regardless of execution order.
    """
    cells = [
        (cfg, det, snr, seed)
        for det in cfg.detectors
        for snr in cfg.snr_grid
        for seed in cfg.seeds
    ]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_cell_task, cells, chunksize=1))
    else:
        outcomes = [_cell_task(cell) for cell in cells]
    records = [o for o in outcomes if isinstance(o, BerRecord)]
    failures = [o for o in outcomes if isinstance(o, CellFailure)]
    for f in failures:
        log.warning(
            "cell failed: %s snr=%g seed=%d: %s", f.detector, f.snr_db, f.seed, f.message
        )
    records.sort(key=lambda r: (r.detector, r.snr_db, r.seed))
    aggregates = aggregate_records(records)
    if cfg.output_path:
        write_csv(cfg.output_path, records, aggregates)
    return ExperimentResult(
        records=tuple(records), aggregates=tuple(aggregates), failures=tuple(failures)
    )


def write_csv(path: str, records, aggregates) -> None:
    """Emit the sweep as UTF-8 CSV with LF endings, per-seed rows first."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for r in list(records) + list(aggregates):
            writer.writerow(
                [
                    r.detector,
                    repr(float(r.snr_db)),
                    r.seed,
                    r.errors,
                    r.bits,
                    repr(float(r.ber)),
                    repr(float(r.kmeans_iterations)),
                    repr(float(r.centroid_dist)),
                    repr(float(r.threshold_inversions)),
                ]
            )


def parse_config_file(path: str) -> dict:
    """Flat `key = value` file; '#' starts a comment, blank lines skipped."""
    settings = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            settings[key.strip()] = value.strip()
    return settings
