import json

import pytest

from saddle_fractal.cli import build_parser, dulac_closed_form, main, trace_dim_formula
from saddle_fractal.orbits1d import MapModel
from saddle_fractal.saddlefield import NormalFormField


def run(argv, tmp_path, name="r.json"):
    path = tmp_path / name
    code = main(argv + ["-o", str(path)])
    return code, json.loads(path.read_text())


def test_orbit_dim_linear(tmp_path):
    code, rep = run(["orbit-dim", "--model", "linear", "--kappa", "0.5"], tmp_path)
    assert code == 0 and rep["pass"]
    assert rep["schema"] == 1 and rep["command"] == "orbit-dim"
    assert rep["estimates"][0]["d"] <= 0.05


def test_report_fields(tmp_path):
    _, rep = run(["orbit-dim", "--model", "linear"], tmp_path)
    for key in ("parameters", "estimates", "formula", "checks", "pass", "wall_time", "backend"):
        assert key in rep
    assert rep["parameters"]["kappa"] == 0.5
    assert all(c["pass"] == (abs(c["value"] - c["target"]) <= c["tolerance"]) for c in rep["checks"])


def test_failing_check_exits_one(tmp_path):
    code, rep = run(["orbit-dim", "--model", "linear", "--tolerance", "0", "--kappa", "0.9",
                     "--eps-first", "2", "--eps-last", "8"], tmp_path)
    assert (code == 0) == rep["pass"]


def test_usage_errors(capsys):
    assert main(["orbit-dim", "--alpha", "0.5"]) == 2
    with pytest.raises(SystemExit) as err:
        main(["orbit-dim", "--nope"])
    assert err.value.code == 2
    assert main(["spiral-dim", "--codim", "4", "--r", "2"]) == 2
    assert main([]) == 2


def test_replay_is_bit_identical(tmp_path):
    code, rep = run(["poincare-asym", "--codim", "3"], tmp_path)
    assert code == 0
    assert rep["estimates"][0]["has_log"] and abs(rep["estimates"][0]["exponent"] - 3) < 0.1
    again = tmp_path / "again.json"
    assert main(["--replay", str(tmp_path / "r.json"), "-o", str(again)]) == 0
    rep2 = json.loads(again.read_text())
    assert rep2["replay"]["identical"]
    assert rep2["estimates"] == rep["estimates"]
    # the subcommand form reads the same report
    assert main(["poincare-asym", "--codim", "3", "--replay", str(tmp_path / "r.json"),
                 "-o", str(again)]) == 0


def test_replay_detects_tampering(tmp_path):
    run(["dulac-check"], tmp_path)
    path = tmp_path / "r.json"
    rep = json.loads(path.read_text())
    rep["estimates"][0]["numeric"] *= 1 + 1e-15
    path.write_text(json.dumps(rep))
    assert main(["--replay", str(path), "-o", str(tmp_path / "x.json")]) == 1


def test_dulac_check(tmp_path):
    code, rep = run(["dulac-check", "--p", "1", "--q", "1", "--a2", "-1"], tmp_path)
    assert code == 0 and rep["checks"][0]["value"] < 1e-8
    assert main(["dulac-check", "--higher", "0.5"]) == 2


def test_csv_and_plot(tmp_path):
    csv_path, svg_path = tmp_path / "m.csv", tmp_path / "m.svg"
    code, rep = run(["orbit-dim", "--model", "linear", "--csv", str(csv_path), "--plot", str(svg_path)],
                    tmp_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "key,epsilon,measure"
    assert len(lines) == 1 + len(rep["estimates"][0]["epsilons"])
    assert float(lines[1].split(",")[1]) == rep["estimates"][0]["epsilons"][0]
    svg = svg_path.read_text()
    assert svg.startswith("<svg") and "<polyline" in svg and "<circle" in svg


def test_hyperbola_single_level(tmp_path):
    code, rep = run(["hyperbola-dim", "--level", "0.25", "--jobs", "2"], tmp_path)
    assert code == 0 and rep["formula"]["family_dim"] == 1.0


def test_spiral_prints_candidates(tmp_path, capsys):
    code, rep = run(["spiral-dim", "--codim", "2", "--eps-first", "2", "--eps-last", "9"], tmp_path)
    assert rep["formula"]["cyclicity_candidates"] == [1, 2]
    assert "cyclicity candidates" in capsys.readouterr().err
    assert code == 0


def test_linearize_check_reports_jacobian(tmp_path):
    code, rep = run(["linearize-check", "--order", "12"], tmp_path)
    assert code == 0
    assert {c["name"]: c["pass"] for c in rep["checks"]} == {
        "curve_deviation": True, "jacobian_limit": True, "axes_fixed": True}


def test_log_env(tmp_path, monkeypatch):
    monkeypatch.setenv("SADDLE_FRACTAL_LOG", "debug")
    code, _ = run(["orbit-dim", "--model", "linear"], tmp_path)
    assert code == 0


def test_helpers():
    assert trace_dim_formula(MapModel("parabolic"), 1.0) == pytest.approx(0.5)
    assert trace_dim_formula(MapModel("parabolic"), 2.0) == pytest.approx(2 / 3)
    assert trace_dim_formula(MapModel("linear"), 2.0) == 0.0
    assert dulac_closed_form(NormalFormField(p=2), 0.1) == pytest.approx(0.01)
    assert "spiral-dim" in build_parser().format_help()
