"""Figure generation: aggregation round-trip, color mapping, file emission."""

import csv
import json

import pytest

from fjreport import (
    SchemaError,
    best_of_trials,
    make_ratio_heatmap,
    make_scaling_plot,
    ratio_color,
    ratio_grid,
    read_ratios,
    read_samples,
    scaling_series,
)
from fjreport.aggregate import RATIOS_FIELDS, SAMPLES_FIELDS
from fjreport.cli import main as report_main


def write_samples(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SAMPLES_FIELDS)
        writer.writerows(rows)


def write_ratios(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RATIOS_FIELDS)
        writer.writerows(rows)


@pytest.fixture
def samples_csv(tmp_path):
    """Two executors x three thread counts x five sizes x three trials."""
    rows = []
    for executor, base in (("amt", 100.0), ("ospool", 120.0)):
        for threads in (4, 8, 16):
            for i, size in enumerate((1000, 3000, 10000, 30000, 100000)):
                for trial in range(3):
                    mflops = base + 10 * i + threads + [0.0, 2.5, 1.25][trial]
                    rows.append(["daxpy", "abp", executor, threads, size,
                                 trial, repr(0.001 * (trial + 1)), repr(mflops)])
    path = tmp_path / "samples.csv"
    write_samples(path, rows)
    return path


@pytest.fixture
def ratios_csv(tmp_path):
    rows = []
    for threads in (4, 8, 16):
        for size in (1000, 10000, 100000):
            if (threads, size) == (8, 10000):
                continue  # a hole in the grid
            ratio = 0.7 + 0.05 * threads / 4 + size / 1e6
            rows.append(["daxpy", threads, size, repr(ratio * 100), repr(100.0),
                         repr(ratio)])
    path = tmp_path / "ratios.csv"
    write_ratios(path, rows)
    return path


def test_read_samples_schema_enforced(tmp_path):
    bad = tmp_path / "bad.csv"
    with open(bad, "w", newline="") as fh:
        csv.writer(fh).writerow(["kernel", "oops"])
    with pytest.raises(SchemaError):
        read_samples(bad)


def test_best_of_trials_takes_max(samples_csv):
    samples = read_samples(samples_csv)
    best = best_of_trials(samples)
    # trials add [0, 2.5, 1.25]: best is the +2.5 trial
    assert best[("daxpy", "amt", 4, 1000)] == 100.0 + 0 + 4 + 2.5


def test_scaling_sidecar_round_trip(samples_csv, tmp_path):
    """Sidecar values reproduce the aggregated CSV exactly."""
    samples = read_samples(samples_csv)
    out = tmp_path / "figs"
    for threads in (4, 8, 16):
        paths = make_scaling_plot(samples, "daxpy", threads, out)
        png, svg, sidecar_path = paths
        assert png.exists() and png.stat().st_size > 0
        assert svg.exists() and svg.stat().st_size > 0
        sidecar = json.loads(sidecar_path.read_text())
        assert sidecar["kernel"] == "daxpy"
        assert sidecar["threads"] == threads
        assert sidecar["missing"] == []
        expected = scaling_series(samples, "daxpy", threads)
        assert set(sidecar["series"]) == set(expected)
        for executor, points in expected.items():
            assert sidecar["series"][executor] == [[s, m] for s, m in points]


def test_scaling_missing_executor_annotated(tmp_path):
    rows = [["daxpy", "abp", "amt", 4, 1000, 0, repr(0.001), repr(50.0)]]
    path = tmp_path / "only_amt.csv"
    write_samples(path, rows)
    samples = read_samples(path)
    png, svg, sidecar_path = make_scaling_plot(samples, "daxpy", 4, tmp_path / "f")
    sidecar = json.loads(sidecar_path.read_text())
    assert sidecar["missing"] == ["ospool"]
    assert png.exists()


def test_scaling_single_point_no_crash(tmp_path):
    rows = [
        ["daxpy", "abp", "amt", 4, 1000, 0, repr(0.001), repr(50.0)],
        ["daxpy", "abp", "ospool", 4, 1000, 0, repr(0.001), repr(60.0)],
    ]
    path = tmp_path / "one.csv"
    write_samples(path, rows)
    samples = read_samples(path)
    paths = make_scaling_plot(samples, "daxpy", 4, tmp_path / "f")
    sidecar = json.loads(paths[2].read_text())
    assert sidecar["series"]["amt"] == [[1000, 50.0]]


def test_heatmap_sidecar_round_trip(ratios_csv, tmp_path):
    ratios = read_ratios(ratios_csv)
    grid = ratio_grid(ratios, "daxpy")
    png, svg, sidecar_path = make_ratio_heatmap(grid, tmp_path / "figs")
    assert png.exists() and svg.exists()
    sidecar = json.loads(sidecar_path.read_text())
    assert sidecar["threads"] == [4, 8, 16]
    assert sidecar["sizes"] == [1000, 10000, 100000]
    by_cell = {(r["threads"], r["size"]): r["ratio"] for r in ratios}
    for ti, threads in enumerate(sidecar["threads"]):
        for si, size in enumerate(sidecar["sizes"]):
            expected = by_cell.get((threads, size))
            assert sidecar["cells"][ti][si] == expected


def test_heatmap_hole_stays_null(ratios_csv, tmp_path):
    ratios = read_ratios(ratios_csv)
    grid = ratio_grid(ratios, "daxpy")
    _, _, sidecar_path = make_ratio_heatmap(grid, tmp_path / "figs")
    sidecar = json.loads(sidecar_path.read_text())
    assert sidecar["cells"][1][1] is None  # threads=8, size=10000 was omitted


def test_heatmap_empty_input_rejected(tmp_path):
    grid = ratio_grid([], "daxpy")
    with pytest.raises(ValueError):
        make_ratio_heatmap(grid, tmp_path)


def test_ratio_color_mapping():
    below = ratio_color(0.7)
    mid = ratio_color(1.0)
    above = ratio_color(1.3)
    assert below != mid != above
    # coolwarm: below-1 is blue-ish (blue channel dominates), above-1 red-ish
    assert below[2] > below[0]
    assert above[0] > above[2]


def test_uniform_grid_uniform_color():
    values = [ratio_color(1.0) for _ in range(3)]
    assert len(set(values)) == 1


def test_cli_end_to_end(samples_csv, ratios_csv, tmp_path):
    out = tmp_path / "out"
    code = report_main([
        "--samples", str(samples_csv),
        "--ratios", str(ratios_csv),
        "--out", str(out),
        "--threads", "4,8,16",
    ])
    assert code == 0
    for threads in (4, 8, 16):
        for ext in ("png", "svg", "json"):
            assert (out / f"scaling_daxpy_t{threads}.{ext}").exists()
    for ext in ("png", "svg", "json"):
        assert (out / f"heatmap_daxpy.{ext}").exists()


def test_cli_requires_some_input(tmp_path):
    assert report_main(["--out", str(tmp_path)]) == 2


def test_cli_threads_validation(tmp_path, samples_csv):
    with pytest.raises(SystemExit):
        report_main(["--samples", str(samples_csv), "--out", str(tmp_path),
                     "--threads", "4,zero"])


def test_acceptance_report_round_trip(samples_csv, ratios_csv, tmp_path):
    """Secondary acceptance: sidecars reproduce aggregated values exactly and
    figures exist in PNG and SVG for thread counts {4, 8, 16}."""
    out = tmp_path / "accept"
    code = report_main([
        "--samples", str(samples_csv),
        "--ratios", str(ratios_csv),
        "--out", str(out),
    ])
    assert code == 0
    samples = read_samples(samples_csv)
    for threads in (4, 8, 16):
        for ext in ("png", "svg"):
            path = out / f"scaling_daxpy_t{threads}.{ext}"
            assert path.exists() and path.stat().st_size > 0
        sidecar = json.loads((out / f"scaling_daxpy_t{threads}.json").read_text())
        expected = scaling_series(samples, "daxpy", threads)
        assert sidecar["series"] == {
            executor: [[s, m] for s, m in points] for executor, points in expected.items()
        }
    heat = json.loads((out / "heatmap_daxpy.json").read_text())
    by_cell = {(r["threads"], r["size"]): r["ratio"] for r in read_ratios(ratios_csv)}
    for ti, threads in enumerate(heat["threads"]):
        for si, size in enumerate(heat["sizes"]):
            assert heat["cells"][ti][si] == by_cell.get((threads, size))
    print("\nACCEPTANCE report-round-trip: PASS")
