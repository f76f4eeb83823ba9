"""Command-line interface tests (in-process via main())."""

import csv
import subprocess
import sys

import numpy as np
import pytest

from mcdet.channel import channel_coefficients, ntx_from_snr
from mcdet.cli import main
from mcdet.detection import mean_count
from mcdet.harness import CSV_HEADER, default_channel


def test_channel_subcommand_prints_table(capsys):
    assert main(["channel", "--slot-mult", "30", "--snr", "20"]) == 0
    out = dict(
        line.split(" ", 1) for line in capsys.readouterr().out.strip().splitlines()
    )
    p = default_channel(30)
    c = channel_coefficients(p, ntx_from_snr(20.0, p))
    assert float(out["noise_mean"]) == c.noise_mean
    for j in range(6):
        assert float(out[f"C_{j}"]) == c.coeffs[j]


def test_ber_subcommand_writes_expected_rows(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main([
        "ber", "--detector", "genie",
        "--snr-min", "15", "--snr-max", "25", "--snr-step", "5",
        "--slot-mult", "30", "--memory", "1",
        "--length", "1024", "--seeds", "2", "--out", str(out),
    ])
    assert code == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 3 * 2 + 3
    assert out.read_text().splitlines()[0] == CSV_HEADER
    assert [r["seed"] for r in rows[-3:]] == ["mean"] * 3
    assert {r["snr_db"] for r in rows} == {"15.0", "20.0", "25.0"}


def test_ber_config_file_overrides_flags(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    flags = [
        "ber", "--detector", "genie", "--snr-min", "20", "--snr-max", "20",
        "--snr-step", "5", "--length", "512", "--seeds", "2",
    ]
    assert main(flags + ["--out", str(out_a)]) == 0
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "snr_min = 20\nsnr_max = 20\nlength = 512\nseeds = 2\ndetector = genie\n"
    )
    # Deliberately wrong flag values, all overridden by the config file.
    assert main([
        "ber", "--detector", "alg1", "--snr-min", "5", "--snr-max", "6",
        "--snr-step", "1", "--length", "256", "--seeds", "1",
        "--config", str(cfg), "--out", str(out_b),
    ]) == 0
    assert out_a.read_text() == out_b.read_text()


def test_unknown_detector_is_config_error(capsys):
    code = main([
        "ber", "--detector", "algX", "--snr-min", "20", "--snr-max", "20",
        "--out", "/tmp/never.csv",
    ])
    assert code == 2
    err = capsys.readouterr().err
    assert "algX" in err
    assert "iter_cluster_threshold" in err


def test_unknown_config_key_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("snr_minimum = 10\n")
    code = main(["ber", "--config", str(cfg), "--out", str(tmp_path / "x.csv")])
    assert code == 2


def test_runtime_failure_exit_code(tmp_path, capsys):
    # Pilot block far shorter than the channel memory: every cell fails.
    code = main([
        "ber", "--detector", "pilot", "--pilot-len", "4",
        "--snr-min", "20", "--snr-max", "20", "--seeds", "1",
        "--length", "512", "--out", str(tmp_path / "x.csv"),
    ])
    assert code == 1
    assert "cell failed" in capsys.readouterr().err


def test_bad_flag_exits_two():
    assert main(["ber", "--no-such-flag"]) == 2


def test_help_exits_zero():
    assert main(["--help"]) == 0


def test_cluster_diag_dump(tmp_path):
    out = tmp_path / "diag.tsv"
    code = main([
        "cluster-diag", "--detector", "alg3", "--memory", "1",
        "--slot-mult", "30", "--snr", "20", "--length", "512",
        "--seed", "0", "--out", str(out),
    ])
    assert code == 0
    lines = out.read_text().strip().split("\n")
    header = lines[0].split("\t")
    assert header == [
        "row_type", "label", "anchor", "cluster", "x_0", "x_1", "theo_0", "theo_1"
    ]
    rows = [line.split("\t") for line in lines[1:]]
    centroids = [r for r in rows if r[0] == "centroid"]
    vectors = [r for r in rows if r[0] == "vector"]
    assert len(centroids) == 4
    assert len(vectors) == 511
    # Theoretical columns reproduce the pattern-conditioned means.
    p = default_channel(30)
    c = channel_coefficients(p, ntx_from_snr(20.0, p))
    for r in centroids:
        lab = tuple(int(ch) for ch in r[1])
        assert float(r[6]) == pytest.approx(mean_count(lab, c), rel=1e-12)
        assert float(r[7]) == pytest.approx(mean_count(lab[1:], c), rel=1e-12)
    clusters = {int(r[3]) for r in vectors}
    assert clusters <= {0, 1, 2, 3}


def test_cluster_diag_rejects_non_clustering_detector(capsys):
    assert main(["cluster-diag", "--detector", "genie"]) == 2


def test_module_entry_point_runs():
    res = subprocess.run(
        [sys.executable, "-m", "mcdet.cli", "channel", "--slot-mult", "20"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert "C_0" in res.stdout
