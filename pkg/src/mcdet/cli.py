"""Command-line front end: BER sweeps, channel tables, cluster dumps."""

from __future__ import annotations

import argparse
import sys

from mcdet.channel import channel_coefficients, ntx_from_snr
from mcdet.clustering import construct_vectors, theoretical_centroids
from mcdet.harness import (
    ExperimentConfig,
    default_channel,
    parse_config_file,
    run_experiment,
    simulate_cell,
)
from mcdet.pipelines import DetectorSpec, canonical_kind, run_detector

_CLUSTER_KINDS = {
    "direct_cluster",
    "cluster_threshold",
    "iter_cluster",
    "iter_cluster_threshold",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcdet",
        description="Monte Carlo detection experiments on the diffusive Poisson channel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ber = sub.add_parser("ber", help="run a BER sweep and write a CSV")
    ber.add_argument("--snr-min", type=float, default=10.0)
    ber.add_argument("--snr-max", type=float, default=30.0)
    ber.add_argument("--snr-step", type=float, default=5.0)
    ber.add_argument("--slot-mult", type=int, default=30,
                     help="slot duration as a multiple of the 9 us base step")
    ber.add_argument("--memory", type=int, default=1,
                     help="feedback/window memory (number of previous symbols)")
    ber.add_argument("--levels", type=int, default=2)
    ber.add_argument("--detector", action="append", default=None,
                     help="detector name, repeatable")
    ber.add_argument("--length", type=int, default=4096,
                     help="symbols per cell")
    ber.add_argument("--seeds", type=int, default=20,
                     help="number of Monte Carlo seeds (0..n-1)")
    ber.add_argument("--out", default="ber.csv")
    ber.add_argument("--config", default=None,
                     help="key = value file; entries override flags")
    ber.add_argument("--pilot-len", type=int, default=1024)

    chan = sub.add_parser("channel", help="print the per-slot mean-count table")
    chan.add_argument("--slot-mult", type=int, default=30)
    chan.add_argument("--snr", type=float, default=20.0)

    diag = sub.add_parser(
        "cluster-diag",
        help="dump centroids, theoretical centroids, and assignments as TSV",
    )
    diag.add_argument("--detector", default="alg3")
    diag.add_argument("--memory", type=int, default=1)
    diag.add_argument("--levels", type=int, default=2)
    diag.add_argument("--slot-mult", type=int, default=30)
    diag.add_argument("--snr", type=float, default=20.0)
    diag.add_argument("--length", type=int, default=4096)
    diag.add_argument("--seed", type=int, default=0)
    diag.add_argument("--out", default=None, help="TSV path, default stdout")
    return parser


def _snr_grid(lo: float, hi: float, step: float) -> list:
    if step <= 0:
        raise ValueError("snr-step must be positive")
    grid = []
    v = lo
    while v <= hi + 1e-9:
        grid.append(round(v, 10))
        v += step
    return grid


_BER_KEYS = {
    "snr_min": float, "snr_max": float, "snr_step": float,
    "slot_mult": int, "memory": int, "levels": int,
    "length": int, "seeds": int, "pilot_len": int,
    "out": str, "detector": str,
}


def _apply_config(args: argparse.Namespace, path: str) -> None:
    for key, value in parse_config_file(path).items():
        if key not in _BER_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        if key == "detector":
            args.detector = [v.strip() for v in value.split(",") if v.strip()]
        else:
            setattr(args, key, _BER_KEYS[key](value))


def _cmd_ber(args: argparse.Namespace) -> int:
    if args.config:
        _apply_config(args, args.config)
    names = args.detector or ["genie"]
    detectors = tuple(
        DetectorSpec(
            kind=name,
            memory=args.memory,
            levels=args.levels,
            pilot_length=(
                args.pilot_len if canonical_kind(name) == "pilot_ce_threshold" else None
            ),
        )
        for name in names
    )
    cfg = ExperimentConfig(
        channel=default_channel(args.slot_mult),
        slot_multiplier=args.slot_mult,
        snr_grid=_snr_grid(args.snr_min, args.snr_max, args.snr_step),
        detectors=detectors,
        sequence_length=args.length,
        seeds=tuple(range(args.seeds)),
        output_path=args.out,
    )
    result = run_experiment(cfg)
    if result.failures:
        for f in result.failures:
            print(
                f"cell failed: {f.detector} snr={f.snr_db} seed={f.seed}: {f.message}",
                file=sys.stderr,
            )
        return 1
    print(f"wrote {len(result.records)} records to {cfg.output_path}")
    return 0


def _cmd_channel(args: argparse.Namespace) -> int:
    params = default_channel(args.slot_mult)
    n_tx = ntx_from_snr(args.snr, params)
    c = channel_coefficients(params, n_tx)
    print(f"slot_duration {float(params.slot_duration)!r}")
    print(f"snr_db {float(args.snr)!r}")
    print(f"n_tx {float(n_tx)!r}")
    print(f"noise_mean {float(c.noise_mean)!r}")
    for j, cj in enumerate(c.coeffs):
        print(f"C_{j} {float(cj)!r}")
    return 0


def _cmd_cluster_diag(args: argparse.Namespace) -> int:
    kind = canonical_kind(args.detector)
    if kind not in _CLUSTER_KINDS:
        raise ValueError(
            f"cluster-diag needs a clustering detector, not {args.detector!r}"
        )
    spec = DetectorSpec(kind=kind, memory=args.memory, levels=args.levels)
    params = default_channel(args.slot_mult)
    _, counts, c = simulate_cell(
        params, args.snr, args.length, args.levels, args.seed
    )
    result = run_detector(counts, spec)
    clus = result.clustering
    theo = theoretical_centroids(c, args.memory, args.levels)
    vectors = construct_vectors(counts, args.memory)

    dim = args.memory + 1
    header = (
        ["row_type", "label", "anchor", "cluster"]
        + [f"x_{j}" for j in range(dim)]
        + [f"theo_{j}" for j in range(dim)]
    )
    rows = [header]
    labels = clus.centroids.labels
    for k, lab in enumerate(labels):
        rows.append(
            ["centroid", "".join(map(str, lab)), "", str(k)]
            + [repr(float(v)) for v in clus.centroids.positions[k]]
            + [repr(float(v)) for v in theo.positions[theo.label_index(lab)]]
        )
    for vec, k in zip(vectors, clus.assignments):
        rows.append(
            ["vector", "".join(map(str, labels[k])), str(vec.anchor_index), str(int(k))]
            + [repr(float(v)) for v in vec.values]
            + [""] * dim
        )
    text = "\n".join("\t".join(row) for row in rows) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, 0 on --help; pass both through
        return int(exc.code or 0)
    try:
        if args.command == "ber":
            return _cmd_ber(args)
        if args.command == "channel":
            return _cmd_channel(args)
        return _cmd_cluster_diag(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
