import json
import subprocess
import sys
from pathlib import Path

import pytest

from polyrep.cli import main
from polyrep.poly import SparsePoly

DATA = Path(__file__).resolve().parent.parent / "data"


def run(tmp_path, *args):
    return main([*args[:1], str(DATA / args[1]), *args[2:], "--out", str(tmp_path)])


def test_build_cube_exact(tmp_path, capsys):
    assert run(tmp_path, "build", "cube.json", "--mode", "raw", "--samples", "5000") == 0
    doc = json.loads((tmp_path / "cube.polys.json").read_text())
    p1 = SparsePoly.from_doc(doc["polynomials"][0])
    want = {(0, 0, 0): 6, (2, 0, 0): -4, (2, 2, 0): 2}
    for e, c in want.items():
        assert p1.terms[e] == c
    prm = json.loads((tmp_path / "cube.params.json").read_text())
    for key in ("k", "y", "aDeviation", "lambdas", "gamma", "alpha", "phi", "eps1", "eps2", "eps3", "delta"):
        assert key in prm


def test_build_tetra_raw_is_cayley(tmp_path):
    assert run(tmp_path, "build", "tetra.json", "--mode", "raw", "--samples", "5000") == 0
    doc = json.loads((tmp_path / "tetra.polys.json").read_text())
    p1 = doc["polynomials"][0]
    assert {"exp": [1, 1, 1], "coef": "-8"} in p1["terms"]
    assert len(p1["terms"]) == 5


def test_build_pyramid_not_simple(tmp_path, capsys):
    assert run(tmp_path, "build", "pyramid.json") == 2
    assert "polytope is not simple" in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert main(["verify", str(tmp_path / "nope.json")]) == 3
    assert "cannot read" in capsys.readouterr().err


def test_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["params", str(bad)]) == 3


@pytest.mark.parametrize("args", [["--samples", "0"], ["--k", "0"]])
def test_invalid_flags(tmp_path, args):
    assert run(tmp_path, "verify", "cube.json", *args) == 3


def test_verify_cube_seed_42(tmp_path):
    assert run(tmp_path, "verify", "cube.json", "--seed", "42") == 0
    report = json.loads((tmp_path / "cube.report.json").read_text())
    assert report["accepted"] and report["violationCount"] == 0
    assert report["samplesInside"] + report["samplesOutside"] >= 100_000


def test_verify_exit_code_tracks_violations(tmp_path):
    code = run(tmp_path, "verify", "cube.json", "--k", "1", "--samples", "5000")
    report = json.loads((tmp_path / "cube.report.json").read_text())
    assert code == 1 and report["accepted"] is False


def test_verify_forced_k_accepted(tmp_path):
    code = run(tmp_path, "verify", "cube.json", "--k", "10", "--samples", "5000")
    report = json.loads((tmp_path / "cube.report.json").read_text())
    assert code == 0 and report["violationCount"] == 0


def test_verify_reuses_params(tmp_path):
    assert run(tmp_path, "build", "square.json", "--samples", "5000") == 0
    prm = str(tmp_path / "square.params.json")
    assert run(tmp_path, "verify", "square.json", "--params", prm, "--samples", "5000") == 0


def test_params_table(tmp_path, capsys):
    assert run(tmp_path, "params", "cube.json") == 0
    out = capsys.readouterr().out
    assert "gamma      0.4226497308" in out
    assert "alpha      1\n" in out
    assert "k_eps" in out and "<- binding" in out.split("k_eps")[1].splitlines()[0]
    assert "k_cone     26.88721876" in out


def test_params_square(tmp_path, capsys):
    assert run(tmp_path, "params", "square.json") == 0
    assert "eps3" in capsys.readouterr().out


def test_params_eps_override(tmp_path, capsys):
    assert run(tmp_path, "params", "cube.json", "--eps", "0.5") == 0
    out = capsys.readouterr().out
    assert "k_cone     26.88721876  <- binding" in out


def test_surface_outputs(tmp_path):
    assert run(tmp_path, "surface", "square.json", "--faces", "0,1", "--samples", "5000") == 0
    lines = (tmp_path / "square.surface.csv").read_text().splitlines()
    assert lines and all(len(l.split(",")) == 2 for l in lines)
    assert run(tmp_path, "surface", "cube.json", "--faces", "1", "--grid", "16") == 0
    obj = (tmp_path / "cube.surface.obj").read_text().splitlines()
    assert obj and all(l.startswith("v ") for l in obj)


def test_surface_rejects_4d(tmp_path):
    assert run(tmp_path, "surface", "triangle_product.json", "--faces", "1") == 3


def test_outputs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["build", str(DATA / "pentagon.json"), "--samples", "5000", "--out", str(d)]) == 0
    for name in ("pentagon.polys.json", "pentagon.params.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_module_entry_point(tmp_path):
    out = subprocess.run(
        [sys.executable, "-m", "polyrep", "params", str(DATA / "tetra.json")],
        capture_output=True, text=True,
    )
    assert out.returncode == 0 and "gamma      0.1835034191" in out.stdout


@pytest.mark.parametrize("faces", ["x", "3", ""])
def test_surface_bad_faces(tmp_path, faces):
    assert run(tmp_path, "surface", "square.json", "--faces", faces) == 3


def test_missing_params_file(tmp_path):
    assert run(tmp_path, "verify", "square.json", "--params", str(tmp_path / "none.json")) == 3
