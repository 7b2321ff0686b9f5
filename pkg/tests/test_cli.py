import json

import pytest

from lamina import cli
from conftest import SURFACES

LAM_DOC = {
    "curves": {"h1": "+e2", "h2": "+e4"},
    "components": [
        {"curve": "h1", "atoms": [["1/2", "1"]], "uniform": []},
        {"curve": "h2", "atoms": [["1/2", "2"]], "uniform": []},
    ],
}

MC_DOC = {
    "curves": {"h1": "+e2", "h2": "+e4"},
    "entries": [{"curve": "h1", "weight": "1"},
                {"curve": "h2", "weight": "2"}],
}


@pytest.fixture()
def surf():
    return str(SURFACES / "L.surf")


@pytest.fixture()
def lam_path(tmp_path):
    p = tmp_path / "lam.json"
    p.write_text(json.dumps(LAM_DOC))
    return str(p)


@pytest.fixture()
def mc_path(tmp_path):
    p = tmp_path / "mc.json"
    p.write_text(json.dumps(MC_DOC))
    return str(p)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_ok(capsys, surf):
    code, out, _ = run(capsys, "validate", surf)
    assert code == 0 and "surface is valid" in out


def test_validate_torus_fails(capsys):
    code, out, _ = run(capsys, "validate", str(SURFACES / "torus.surf"))
    assert code == 1
    assert "chi(S) < 0" in out and "surface is invalid" in out


def test_intersect_example(capsys, surf, lam_path):
    # the flagship example: lam {h1:1, h2:2} against v1 prints 3
    code, out, _ = run(capsys, "intersect", surf, lam_path, "+e0")
    assert code == 0 and out.strip() == "3"


def test_intersect_named_curve(capsys, surf, lam_path):
    code, out, _ = run(capsys, "intersect", surf, lam_path, "h1")
    assert code == 0 and out.strip() == "0"


def test_intersect_json_certificates(capsys, surf, lam_path):
    code, out, _ = run(capsys, "intersect", surf, lam_path, "+e0",
                       "--format", "json")
    doc = json.loads(out)
    assert doc["value"] == "3"
    assert {c["component"] for c in doc["certificates"]} == {"h1", "h2"}
    for c in doc["certificates"]:
        assert c["flat_certificate"]["count"] == \
            c["hyperbolic_certificate_diagnostic"]["count"]


def test_project(capsys, surf, lam_path):
    code, out, _ = run(capsys, "project", surf, lam_path)
    assert code == 0 and out == "h1: 1\nh2: 2\n"


def test_fiber(capsys, surf, mc_path):
    code, out, _ = run(capsys, "fiber", surf, mc_path)
    assert code == 0
    assert "h1: L = 1, delta = 1" in out and "h2: L = 1, delta = 2" in out


def test_cylinders_and_straighten(capsys, surf):
    code, out, _ = run(capsys, "cylinders", surf, "+e2 +e3")
    assert code == 0 and "height^2 = 1/5" in out and \
        "circumference^2 = 5" in out
    code, out, _ = run(capsys, "straighten", surf, "+e0", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["length2"] == "4" and doc["cylinder_family"]


def test_straighten_svg(capsys, surf):
    code, out, _ = run(capsys, "straighten", surf, "+e2 +e3",
                       "--format", "svg")
    assert code == 0 and out.startswith("<svg")


def test_tree_json(capsys, surf, lam_path):
    code, out, _ = run(capsys, "tree", surf, lam_path, "+e0",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["vertices"] == ["v0"]
    assert sorted(e["length"] for e in doc["edges"]) == ["1", "2"]
    assert doc["lengths"]["+e0"] == "3"


def test_lengths(capsys, surf, lam_path):
    code, out, _ = run(capsys, "lengths", surf, lam_path, "+e0", "h2")
    assert code == 0
    assert "+e0: flat 3, hyperbolic 3, equal" in out


def test_check(capsys, surf, lam_path):
    code, out, _ = run(capsys, "check", surf, lam_path, "--lifts", "12",
                       "--seed", "1")
    assert code == 0 and "check passed" in out
    assert out.count("pass") >= 5


def test_determinism(capsys, surf, lam_path):
    _, out1, _ = run(capsys, "tree", surf, lam_path, "--format", "json")
    _, out2, _ = run(capsys, "tree", surf, lam_path, "--format", "json")
    assert out1 == out2


def test_domain_error_exit_1(capsys, surf, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "curves": {"h1": "+e2", "v1": "+e0"},
        "components": [
            {"curve": "h1", "atoms": [["1/2", "1"]], "uniform": []},
            {"curve": "v1", "atoms": [["1/2", "1"]], "uniform": []},
        ]}))
    code, _, err = run(capsys, "project", surf, str(bad))
    assert code == 1 and "interlaced pair" in err
    code, _, err = run(capsys, "validate", str(SURFACES / "missing.surf"))
    assert code == 1 and "error:" in err


def test_usage_error_exit_2(surf):
    with pytest.raises(SystemExit) as exc:
        cli.main(["nosuch", surf])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2
