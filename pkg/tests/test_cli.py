import json
import subprocess
import sys

import numpy as np
import pytest

from noisyattractor import atlas_io
from noisyattractor.boundary import build_atlas
from noisyattractor.cli import main
from noisyattractor.linalg import sphere_grid


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def test_compute_csv_scalar(tmp_path):
    out = tmp_path / "atlas.csv"
    code = main(["compute", "--matrix", "[[0.5,0],[0,0.5]]", "--epsilon", "0.1", "--out", str(out)])
    assert code == 0
    header, data = read_csv(out)
    assert header == ["n_1", "n_2", "x_1", "x_2", "h"]
    assert data.shape == (720, 5)
    np.testing.assert_allclose(data[:, -1], 0.2, atol=1e-10)


def test_compute_gate_failure(tmp_path, capsys):
    code = main(["compute", "--matrix", "[[1.1,0],[0,0.5]]", "--epsilon", "0.1", "--out", str(tmp_path / "a.csv")])
    assert code == 2
    err = capsys.readouterr().err
    assert "spectral radius 1.1" in err and "no bounded attractor exists" in err
    assert not (tmp_path / "a.csv").exists()


def test_compute_singular(tmp_path):
    assert main(["compute", "--matrix", "[[1,2],[2,4]]", "--epsilon", "0.1"]) == 2


def test_parse_failures(tmp_path):
    assert main(["compute", "--matrix", "[[1,2],[3]]", "--epsilon", "0.1"]) == 4
    assert main(["compute", "--matrix", "[[0.5,0],[0,0.5]]"]) == 4
    assert main(["compute", "--matrix", "[[0.5,0],[0,0.5]]", "--epsilon", "-1"]) == 4
    assert main(["frobnicate"]) == 4
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["compute", "--config", str(bad)]) == 4
    three = "[[0.5,0,0],[0,0.5,0],[0,0,0.5]]"
    assert main(["compute", "--matrix", three, "--epsilon", "0.1", "--format", "svg"]) == 4


def test_io_failure(tmp_path):
    missing = tmp_path / "no" / "such" / "dir" / "a.csv"
    assert main(["compute", "--matrix", "[[0.5,0],[0,0.5]]", "--epsilon", "0.1", "--out", str(missing)]) == 3
    assert main(["compute", "--config", str(tmp_path / "missing.json")]) == 3


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"matrix": [[0.9, 0], [0, 0.5]], "epsilon": 0.1, "directions": 90, "format": "json"}))
    out = tmp_path / "a.json"
    assert main(["compute", "--config", str(cfg), "--directions", "36", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["records"]) == 36
    assert doc["truncation_order"] > 0 and doc["tail_bound"] <= 5e-11
    assert abs(doc["records"][0]["h"] - 1.0) <= 1e-9


def test_svg_matches_atlas(tmp_path):
    out = tmp_path / "a.svg"
    assert main(["compute", "--matrix", "[[0.9,0],[0,0.5]]", "--epsilon", "0.1", "--format", "svg", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.count("<path") == 1 and ' Z"' in text
    pts = atlas_io.svg_path_points(text)
    atlas = build_atlas(np.diag([0.9, 0.5]), 0.1, sphere_grid(2, 720))
    np.testing.assert_array_equal(pts, atlas.points)
    R = 1.1 * np.max(np.abs(atlas.points))
    assert f'viewBox="{-R:.17g} {-R:.17g} {2 * R:.17g} {2 * R:.17g}"' in text


def test_verify_pass(tmp_path, capsys):
    report = tmp_path / "report.json"
    assert main(["verify", "--matrix", "[[0.5,0.3],[0,0.4]]", "--epsilon", "0.1", "--out", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["passed"]
    names = {c["name"] for c in doc["checks"]}
    assert {"support_identity", "b_invariance", "convexity", "strict_convexity", "conjugacy",
            "boundary_invertibility", "refinement_continuity"} <= names
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == len(doc["checks"]) and all(l.startswith("PASS") for l in lines)


def test_verify_scalar_reports_ball(tmp_path):
    report = tmp_path / "r.json"
    assert main(["verify", "--matrix", "[[0.5,0],[0,0.5]]", "--epsilon", "0.1", "--out", str(report)]) == 0
    fit = [c for c in json.loads(report.read_text())["checks"] if c["name"] == "ellipse_fit_residual"][0]
    assert "constant support (ball)" in fit["detail"]
    assert fit["value"] <= 1e-10


def test_verify_three_dimensional():
    assert main(["verify", "--matrix", "[[0.5,0.2,0],[0,0.4,0.1],[0.1,0,-0.6]]", "--epsilon", "0.1",
                 "--directions", "500"]) == 0


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_verify_from_file_round_trip(tmp_path, fmt):
    atlas_path = tmp_path / f"a.{fmt}"
    args = ["--matrix", "[[0.5,0.3],[0,0.4]]", "--epsilon", "0.1"]
    assert main(["compute", *args, "--format", fmt, "--out", str(atlas_path)]) == 0
    direct, stored = tmp_path / "direct.json", tmp_path / "stored.json"
    assert main(["verify", *args, "--out", str(direct)]) == 0
    assert main(["verify", *args, "--atlas", str(atlas_path), "--out", str(stored)]) == 0
    assert json.loads(direct.read_text()) == json.loads(stored.read_text())


def test_verify_corrupted_atlas(tmp_path):
    atlas_path = tmp_path / "a.csv"
    args = ["--matrix", "[[0.5,0.3],[0,0.4]]", "--epsilon", "0.1"]
    assert main(["compute", *args, "--out", str(atlas_path)]) == 0
    lines = atlas_path.read_text().splitlines()
    fields = lines[100].split(",")
    fields[2] = repr(float(fields[2]) * 1.001)
    lines[100] = ",".join(fields)
    atlas_path.write_text("\n".join(lines) + "\n")
    report = tmp_path / "r.json"
    assert main(["verify", *args, "--atlas", str(atlas_path), "--out", str(report)]) == 1
    failed = [c["name"] for c in json.loads(report.read_text())["checks"] if not c["passed"]]
    assert "record_consistency" in failed


def test_render(tmp_path):
    src, svg = tmp_path / "a.json", tmp_path / "a.svg"
    assert main(["compute", "--matrix", "[[0.9,0],[0,0.5]]", "--epsilon", "0.1", "--format", "json", "--out", str(src)]) == 0
    assert main(["render", "--atlas", str(src), "--out", str(svg)]) == 0
    atlas = atlas_io.read_atlas(src)
    np.testing.assert_array_equal(atlas_io.svg_path_points(svg.read_text()), atlas.points)


def test_simulate_scalar(tmp_path):
    out = tmp_path / "cloud.csv"
    code = main(["simulate", "--matrix", "[[0.5,0],[0,0.5]]", "--epsilon", "0.1", "--samples", "10000", "--out", str(out)])
    assert code == 0
    doc = json.loads((tmp_path / "cloud.report.json").read_text())
    assert doc["containment_fraction"] == 1.0 and doc["samples"] == 10000
    header, data = read_csv(out)
    assert header == ["x_1", "x_2"] and data.shape == (10000, 2)


def test_simulate_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--matrix", "[[0.5,0.3],[0,0.4]]", "--epsilon", "0.1", "--samples", "2000", "--seed", "42"]
    assert main([*args, "--out", str(a)]) == 0
    assert main([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_probe(capsys):
    c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
    matrix = json.dumps([[c, -s], [s, c]])
    assert main(["simulate", "--matrix", matrix, "--epsilon", "0.1", "--probe", "50"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["probe_value"] - 5.0) <= 1e-12
    assert abs(doc["probe_max"] - 5.0) <= 1e-12


def test_simulate_gate_without_probe():
    assert main(["simulate", "--matrix", "[[1.1,0],[0,0.5]]", "--epsilon", "0.1", "--samples", "10"]) == 2


def test_simulate_divergence_exit(tmp_path):
    cfg = tmp_path / "run.json"
    # the gate passes, but the transient growth of M overflows the huge start point
    cfg.write_text(json.dumps({"matrix": [[0.5, 2.0], [0, 0.5]], "epsilon": 0.1, "x0": [1.7e308, 1.7e308],
                               "burn_in": 0, "samples": 5, "directions": 16}))
    code = main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "c.csv")])
    assert code == 5


def test_module_entry_point(tmp_path):
    out = tmp_path / "a.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "noisyattractor", "compute", "--matrix", "0.5,0;0,0.5", "--epsilon", "0.1",
         "--directions", "8", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(out.read_text().splitlines()) == 9
