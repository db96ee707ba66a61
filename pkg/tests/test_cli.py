import json

import numpy as np
import pytest
from click.testing import CliRunner

from ribbonlink import cli
from ribbonlink.errors import TooManyRetries


@pytest.fixture()
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli.main, [str(a) for a in args])

    return invoke


def test_analyze_circle_turns(run):
    res = run("analyze", "--family", "circle", "--framing", "turns:3")
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert doc["lk_rounded"] == 3
    assert abs(doc["residual"]) < 1e-3
    assert doc["diagnostics"]["tw_local_form"] == pytest.approx(doc["tw"], abs=1e-6)


def test_analyze_fig2(run):
    res = run("analyze", "--family", "paper_fig2", "--framing", "frenet", "--n", 1024)
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert abs(doc["lk_gauss"] - doc["lk_rounded"]) < 1e-3
    assert abs(doc["residual"]) < 1e-3


def test_analyze_too_few_samples(run):
    res = run("analyze", "--family", "circle", "--framing", "frenet", "--n", 8)
    assert res.exit_code == cli.EXIT_VALIDATION
    assert "TooFewSamples" in res.output


def test_flagged_residual_exit_code(run):
    res = run("analyze", "--family", "torus_knot", "--n", 48)
    assert res.exit_code == cli.EXIT_FLAGGED
    assert "residual" in json.loads(res.output)["diagnostics"]["flags"]


@pytest.mark.parametrize("args", [
    ("--family", "spiral"),
    ("--family", "circle", "--framing", "sideways"),
    ("--family", "circle", "--framing", "turns:x"),
    ("--family", "torus_knot", "--param", "q"),
    ("--family", "torus_knot", "--param", "q=4"),
])
def test_validation_errors(run, args):
    assert run("analyze", *args).exit_code == cli.EXIT_VALIDATION


def test_params_are_parsed(run):
    res = run("export", "--family", "torus_knot", "--param", "p=3", "--param", "q=2", "--n", 64)
    assert res.exit_code == 0
    assert json.loads(res.output)["name"] == "torus_knot(p=3,q=2)"


def test_mc_circle_and_determinism(run):
    args = ("mc", "--family", "circle", "--framing", "turns:3", "--n", 128, "--m", 200, "--seed", 4)
    first = run(*args)
    second = run(*args)
    assert first.exit_code == 0
    assert first.output == second.output
    doc = json.loads(first.output)
    tw = doc["twist_mc"]
    assert abs(tw["estimate"] - 3.0) <= 3 * tw["std_error"]
    assert doc["z_twist"] is None and doc["z_writhe"] is None


def test_mc_fig2_z_scores(run):
    res = run("mc", "--family", "paper_fig2", "--n", 256, "--m", 1000, "--seed", 0)
    doc = json.loads(res.output)
    assert abs(doc["z_twist"]) < 3.5 and abs(doc["z_writhe"]) < 3.5


def test_mc_needs_enough_directions(run):
    assert run("mc", "--family", "circle", "--n", 64, "--m", 10).exit_code == cli.EXIT_VALIDATION


def test_mc_too_many_retries(run, monkeypatch):
    def boom(*a, **k):
        raise TooManyRetries("synthetic")

    monkeypatch.setattr(cli, "twist_mc", boom)
    assert run("mc", "--family", "circle", "--n", 64, "--m", 100).exit_code == cli.EXIT_RETRIES


def test_frame_circle(run, tmp_path):
    svg = tmp_path / "sphere.svg"
    res = run("frame", "--family", "circle", "--n", 128, "--svg", svg)
    assert res.exit_code == 0
    doc = json.loads(res.output)
    u0 = np.array(doc["u0"])
    t = 2 * np.pi * np.arange(128) / 128
    assert np.max(np.abs(u0 + np.stack([np.cos(t), np.sin(t), 0 * t], axis=1))) < 1e-9
    assert doc["report"]["lk_rounded"] == 0
    text = svg.read_text()
    assert 'class="fan"' in text and 'class="semicircle"' in text and "indicatrix-plus" in text


@pytest.mark.parametrize("family", ["paper_fig2", "torus_knot"])
def test_frame_zero_link(run, family):
    res = run("frame", "--family", family, "--n", 512)
    assert res.exit_code == 0
    rep = json.loads(res.output)["report"]
    assert rep["lk_rounded"] == 0
    assert abs(rep["tw"] + rep["wr"]) < 1e-3


def test_discontinuous_framing_file(run, tmp_path):
    res = run("frame", "--family", "paper_fig2", "--n", 128)
    doc = json.loads(res.output)
    u = np.array(doc["u0"])
    u[60:] *= -1
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"name": "bad", "u": u.tolist()}))
    res = run("analyze", "--family", "paper_fig2", "--n", 128, "--framing", f"file:{path}")
    assert res.exit_code == cli.EXIT_FRAMING


def test_project_fig1(run, tmp_path):
    svg = tmp_path / "fig1.svg"
    res = run("project", "--fixture", "fig1", "--svg", svg)
    assert res.exit_code == 0
    doc = json.loads(res.output)
    ab = [c for c in doc["crossings"] if c["curves"] == "ab"]
    assert sorted(c["sign"] for c in ab if c["kind"] == "local") == [-1, 1]
    assert sorted(c["sign"] for c in ab if c["kind"] == "nonlocal") == [1, 1]
    assert doc["lk_from_crossings"] == 1
    text = svg.read_text()
    assert 'class="edge-a"' in text and 'class="edge-b"' in text
    assert text.count('data-kind="local"') == 2 and text.count('data-kind="nonlocal"') == 2
    assert "data-s-prime" in text


def test_project_circle_from_above(run):
    res = run("project", "--family", "circle", "--n", 128, "--direction", "0,0,1")
    assert res.exit_code == 0
    assert json.loads(res.output)["crossings"] == []


def test_project_parity(run):
    res = run("project", "--family", "torus_knot", "--n", 512, "--direction", "0.3,-0.2,0.9")
    doc = json.loads(res.output)
    assert doc["totals"]["ab"] % 2 == 0


def test_project_degenerate(run):
    res = run("project", "--family", "circle", "--framing", "turns:1", "--n", 64, "--direction", "0,1,0")
    assert res.exit_code == cli.EXIT_PROJECTION


def test_project_bad_direction(run):
    assert run("project", "--family", "circle", "--direction", "1,2").exit_code == cli.EXIT_VALIDATION


def test_json_round_trip(run, tmp_path):
    curve = tmp_path / "curve.json"
    frame = tmp_path / "frame.json"
    assert run("export", "--family", "paper_fig2", "--n", 256, "--out", curve).exit_code == 0
    assert run("frame", "--input", curve, "--out", frame).exit_code == 0
    direct = json.loads(run("analyze", "--family", "paper_fig2", "--n", 256, "--framing", "writhe").output)
    again = json.loads(run("analyze", "--input", curve, "--framing", f"file:{frame}").output)
    for key in ("lk_gauss", "tw", "wr", "residual"):
        assert again[key] == pytest.approx(direct[key], abs=1e-12)


def test_parametric_input_file(run, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"name": "knot", "parametric": {"family": "torus_knot", "params": {"p": 2, "q": 3},
                                                               "n": 512}}))
    doc = json.loads(run("analyze", "--input", path).output)
    assert doc["curve"] == "knot" and doc["n"] == 512 and doc["lk_rounded"] == -6


def test_input_and_family_conflict(run, tmp_path):
    path = tmp_path / "c.json"
    run("export", "--family", "circle", "--n", 32, "--out", path)
    assert run("analyze", "--input", path, "--family", "circle").exit_code == cli.EXIT_VALIDATION
