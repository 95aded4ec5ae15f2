import json

import pytest

from reflective_billiards.cli import main
from reflective_billiards.serialization import billiard_to_dict, dumps
from reflective_billiards.suite import builtin_billiards


def test_verify_type3_passes(tmp_path):
    out = tmp_path / "r.json"
    code = main(["verify", "--builtin", "type3", "--foci", "1", "--lambdas", "4", "2",
                 "--grid", "24", "--tol", "1e-9", "--out", str(out)])
    assert code == 0
    r = json.loads(out.read_text())
    assert r["passed"] and r["fraction_closed"] == 1.0


def test_verify_triangle_conics_fails(capsys):
    assert main(["verify", "--builtin", "triangle-conics", "--grid", "16"]) == 1
    assert json.loads(capsys.readouterr().out)["passed"] is False


def test_verify_from_file(tmp_path):
    b, patch = builtin_billiards()["type2-rotation"]
    d = billiard_to_dict(b)
    d["patch"] = {"t1": list(patch.t1), "t2": list(patch.t2)}
    f = tmp_path / "b.json"
    f.write_text(dumps(d))
    assert main(["verify", "--input", str(f), "--grid", "6", "--out", str(tmp_path / "o.json")]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--input", "/nonexistent/billiard.json"],
        ["verify"],
        ["verify", "--builtin", "nope"],
        ["verify", "--builtin", "type3", "--tol", "-1"],
        ["verify", "--builtin", "type3", "--patch", "1,2"],
        ["render", "--builtin", "type3"],
        ["suite", "--only", "99"],
        ["frobnicate"],
    ],
)
def test_usage_errors_exit_2(argv):
    assert main(argv) == 2


def test_malformed_input_exit_2(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    assert main(["verify", "--input", str(f)]) == 2
    f.write_text('{"mirrors": [{"kind": "spline"}]}')
    assert main(["verify", "--input", str(f), "--patch", "0,1,0,1"]) == 2


@pytest.mark.parametrize("figure", ["orbits", "spiral", "trace"])
def test_render_writes_svg(tmp_path, figure):
    out, csv = tmp_path / "f.svg", tmp_path / "f.csv"
    args = ["render", "--builtin", "type3", "--figure", figure, "--out", str(out), "--steps", "50"]
    if figure != "trace":
        args += ["--csv", str(csv)]
    assert main(args) == 0
    assert out.read_text().startswith("<?xml")
    if figure != "trace":
        assert csv.read_text().count("\n") > 1


def test_suite_subset_json(tmp_path):
    out = tmp_path / "s.json"
    assert main(["suite", "--only", "1", "projective", "--seed", "3", "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["seed"] == 3 and [c["id"] for c in r["criteria"]] == [1]
