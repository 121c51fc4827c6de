import copy
import csv
import json
import math

import numpy as np
import pytest
import yaml

from ncoscillator.errors import ConfigError
from ncoscillator.harness import figures
from ncoscillator.harness.cli import main
from ncoscillator.harness.config import load_config, parse_config, set_path
from ncoscillator.harness.runner import run
from ncoscillator.harness.sweep import parse_values, sweep

MINIMAL = {
    "schema_version": 1,
    "constants": {"m": 1, "hbar": 1, "omega": 1, "tau": 1},
    "background": {"mode": "theta_omega", "theta": {"family": "constant", "value": 0},
                   "omega": {"family": "constant", "value": 0}},
    "ep": {"method": "auto", "tolerance": 1e-10},
    "analysis": [{"kind": "eigenstate", "n": 0, "m": 0}],
    "t_grid": {"start": 0, "stop": 3, "points": 31},
    "output": "out",
}

EXPONENTIAL = {
    "schema_version": 1,
    "background": {"mode": "theta_omega", "theta": {"family": "exponential", "amplitude": 5, "rate": -2},
                   "omega": {"family": "exponential", "amplitude": 2, "rate": 2}},
    "ep": {"method": "numeric", "ics": [math.sqrt(5 / 3), -math.sqrt(5 / 3)], "tolerance": 1e-8},
    "analysis": [{"kind": "gk", "n": 0, "m0": 0, "phi0": 0, "s": 0.5}],
    "t_grid": {"start": 0, "stop": 1.5, "points": 16},
    "output": "out",
}


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_yaml(tmp_path, raw, name="cfg.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(raw), encoding="utf-8")
    return path


def test_minimal_run(tmp_path):
    report = run(parse_config(MINIMAL), tmp_path / "run")
    assert report.exit_code == 0
    rows = read_csv(tmp_path / "run" / "analysis_00_eigenstate_n0_m0.csv")
    assert len(rows) == 31
    assert {r["prod_xpx"] for r in rows} == {"0.5"}
    manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
    assert manifest["ep"]["method"] == "pinney_superposition"
    assert manifest["ep"]["residual_max"] <= manifest["ep"]["tolerance"]
    assert manifest["version"] == "0.1.0"
    assert all(c["passed"] for c in manifest["checks"])
    text = (tmp_path / "run" / "manifest.json").read_text()
    assert list(json.loads(text)) == sorted(json.loads(text))
    assert "time" not in text.lower().replace("t_grid", "")


def test_run_is_byte_deterministic(tmp_path):
    cfg = parse_config(EXPONENTIAL)
    run(cfg, tmp_path / "a")
    run(cfg, tmp_path / "b")
    for name in ("ep.csv", "analysis_00_gk_n0_s0.5.csv", "manifest.json"):
        data = (tmp_path / "a" / name).read_bytes()
        assert data == (tmp_path / "b" / name).read_bytes()
        assert b"\r\n" not in data


def test_all_analysis_kinds(tmp_path):
    raw = copy.deepcopy(EXPONENTIAL)
    raw["analysis"] = [
        {"kind": "eigenstate", "n": 1, "m": 2},
        {"kind": "glauber", "alpha": [1.0, -0.5]},
        {"kind": "squeezed", "alpha": [0, 0], "beta": 0.3},
        {"kind": "squeezed", "beta": "beta_min"},
        {"kind": "squeezed", "beta": "optimize", "target": "XY"},
        {"kind": "gk", "n": 1, "m0": 1, "phi0": 0.2, "s": 0.75},
    ]
    report = run(parse_config(raw), tmp_path)
    assert report.exit_code == 0, report.manifest["checks"]
    rows = read_csv(tmp_path / "analysis_04_squeezed.csv")
    assert max(abs(float(r["beta"])) for r in rows) < 1e-6
    assert len(report.manifest["files"]) == 7


def test_validation_errors_name_fields():
    cases = [
        (("schema_version",), 2, "schema_version"),
        (("background", "theta", "family"), "cubic", "background.theta.family"),
        (("t_grid", "points"), 1, "t_grid.points"),
        (("t_grid", "stop"), -1, "t_grid.stop"),
        (("analysis", 0, "n"), -1, "analysis.0.n"),
        (("ep", "method"), "magic", "ep.method"),
        (("constants", "hbar"), 0, "constants"),
    ]
    for keys, value, path in cases:
        raw = copy.deepcopy(MINIMAL)
        node = raw
        for key in keys[:-1]:
            node = node[key]
        node[keys[-1]] = value
        with pytest.raises(ConfigError) as err:
            parse_config(raw)
        assert err.value.path == path


def test_stop_past_cutoff_names_tc(tmp_path):
    raw = {"schema_version": 1, "background": {"mode": "chiellini_exponential", "alpha": 5, "beta": 2, "gamma": 2},
           "analysis": [{"kind": "eigenstate", "n": 0, "m": 0}], "t_grid": {"start": 0, "stop": 1.0}}
    with pytest.raises(ConfigError) as err:
        parse_config(raw)
    assert "t_c=0.8047" in str(err.value)
    assert main(["run", str(write_yaml(tmp_path, raw))]) == 1


def test_chiellini_config_uses_closed_form(tmp_path):
    raw = {"schema_version": 1, "background": {"mode": "chiellini_rational", "n": 2, "alpha": 1, "beta": 2, "mu": 1},
           "ep": {"tolerance": 1e-10},
           "analysis": [{"kind": "eigenstate", "n": 0, "m": 1}], "t_grid": {"start": 0, "stop": 0.2, "points": 10}}
    report = run(parse_config(raw), tmp_path)
    assert report.manifest["ep"]["method"] == "chiellini_rational"
    assert report.exit_code == 0


def test_numerical_failure_writes_partial_manifest(tmp_path):
    raw = copy.deepcopy(MINIMAL)
    raw["background"] = {"mode": "direct_ab", "a": {"family": "constant", "value": 0.5},
                         "b": {"family": "constant", "value": 2.0}}
    raw["output"] = str(tmp_path / "fail")
    assert main(["run", str(write_yaml(tmp_path, raw))]) == 2
    manifest = json.loads((tmp_path / "fail" / "manifest.json").read_text())
    assert manifest["status"] == "failed"
    assert manifest["error"]["type"] == "DomainError"


def test_load_config_json_and_bad_file(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(MINIMAL))
    assert load_config(path).t_grid.points == 31
    bad = tmp_path / "bad.yaml"
    bad.write_text("schema_version: [1\n")
    with pytest.raises(ConfigError):
        load_config(bad)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.yaml")


def test_set_path():
    out = set_path(MINIMAL, "analysis.0.m", 3)
    assert out["analysis"][0]["m"] == 3 and MINIMAL["analysis"][0]["m"] == 0
    for bad in ("analysis.4.m", "nothing", "t_grid.stop.x"):
        with pytest.raises(ConfigError):
            set_path(MINIMAL, bad, 1)


def test_parse_values():
    assert parse_values("0.1, 0.5,0.75") == [0.1, 0.5, 0.75]
    assert parse_values("[1, [2, 3]]") == [1, [2, 3]]
    for empty in ("", "[]", " , "):
        with pytest.raises(ConfigError):
            parse_values(empty)


def test_gk_width_sweep(tmp_path):
    seq = tmp_path / "seq.csv"
    par = tmp_path / "par.csv"
    rows, failures = sweep(EXPONENTIAL, "analysis.0.s", [0.1, 0.5, 0.75], seq)
    assert failures == 0 and len(rows) == 3 * 16
    sweep(EXPONENTIAL, "analysis.0.s", [0.1, 0.5, 0.75], par, workers=3)
    assert seq.read_bytes() == par.read_bytes()
    table = read_csv(seq)
    narrow = [r for r in table if r["value"] == "0.1"]
    # s = 0.1 collapses onto the ground state, where dx dpx = hbar/2 sqrt(1 + sigma^2 v^2)
    assert all(float(r["00_gk:prod_xpx"]) >= 0.5 - 1e-12 for r in narrow)
    widths = {r["value"] for r in table}
    assert widths == {"0.1", "0.5", "0.75"}


def test_sweep_records_failures(tmp_path):
    out = tmp_path / "s.csv"
    rows, failures = sweep(EXPONENTIAL, "analysis.0.s", [0.5, -1.0], out)
    assert failures == 1
    bad = [r for r in read_csv(out) if r["value"] == "-1"]
    assert len(bad) == 1 and bad[0]["status"].startswith("error: ConfigError")


def test_sweep_ordering_in_quantum_numbers(tmp_path):
    raw = copy.deepcopy(EXPONENTIAL)
    raw["analysis"] = [{"kind": "eigenstate", "n": 0, "m": 0}]
    out = tmp_path / "nm.csv"
    sweep(raw, "analysis.0.m", [0, 1, 2, 3, 4], out)
    table = read_csv(out)
    for t in {r["t"] for r in table}:
        vals = [float(r["00_eigenstate:prod_XY"]) for r in table if r["t"] == t]
        assert all(b > a for a, b in zip(vals, vals[1:]))


def test_sweep_cli(tmp_path):
    path = write_yaml(tmp_path, EXPONENTIAL)
    assert main(["sweep", str(path), "--param", "analysis.0.s", "--values", "[]"]) == 1
    assert main(["sweep", str(path), "--param", "analysis.9.s", "--values", "0.5"]) == 1
    out = tmp_path / "cli.csv"
    assert main(["sweep", str(path), "--param", "analysis.0.s", "--values", "0.5,0.75",
                 "--output", str(out)]) == 0
    assert out.exists()


def test_ep_solve_cli(tmp_path):
    raw = copy.deepcopy(EXPONENTIAL)
    raw["output"] = str(tmp_path / "ep")
    assert main(["ep-solve", str(write_yaml(tmp_path, raw))]) == 0
    manifest = json.loads((tmp_path / "ep" / "manifest.json").read_text())
    assert manifest["ep"]["method"] == "numeric"
    assert read_csv(tmp_path / "ep" / "ep.csv")[0]["sigma"] == "1.29099444874"


def test_fig1a_two_series(tmp_path):
    res = figures.reproduce_figure("fig1a", tmp_path, points=60, plot=False)
    assert res.ok
    closed = read_csv(tmp_path / "fig1a_closed_form.csv")
    numeric = read_csv(tmp_path / "fig1a_numeric.csv")
    assert float(closed[0]["sigma"]) == pytest.approx(math.sqrt(5 / 3), abs=1e-11)
    assert float(closed[-1]["t"]) == pytest.approx(math.log(5) / 2, abs=1e-11)
    assert float(numeric[-1]["t"]) == 2.0
    assert res.manifest["info"]["closed_form"]["kappa"] == 0.25


def test_fig2a_dominates_bound(tmp_path):
    res = figures.reproduce_figure("fig2a", tmp_path, points=80, plot=False)
    table = read_csv(tmp_path / "fig2a.csv")
    pairs = [c for c in table[0] if c.startswith("n")]
    assert len(pairs) == len(figures.EIGEN_PAIRS)
    for row in table:
        assert all(float(row[p]) >= float(row["bound"]) for p in pairs)
    assert res.ok


def test_fig4b_bound_column(tmp_path):
    figures.reproduce_figure("fig4b", tmp_path, points=50, plot=False)
    for row in read_csv(tmp_path / "fig4b.csv"):
        t = float(row["t"])
        expected = 0.5 + 5 * math.sin(2 * t) * 2 * math.sin(t) / 8
        assert float(row["bound"]) == pytest.approx(expected, abs=1e-10)


def test_fig5_series_and_png(tmp_path):
    res = figures.reproduce_figure("fig5a", tmp_path, points=40, plot=True)
    header = read_csv(tmp_path / "fig5a.csv")[0]
    assert {"glauber", "squeezed_beta_min", "gk_s0.5", "gk_s0.75", "bound"} <= set(header)
    png = (tmp_path / "fig5a.png").read_bytes()
    assert png.startswith(b"\x89PNG")
    assert res.ok


def test_fig6a_reports_deviation(tmp_path):
    res = figures.reproduce_figure("fig6a", tmp_path, points=40, plot=False)
    info = json.loads((tmp_path / "fig6a_manifest.json").read_text())["info"]
    assert info["beta_quoted"] == -1.88203
    assert abs(info["beta_star"] - info["beta_scan"]) <= 1e-4
    assert "relative_deviation_from_quoted" in info
    assert res.ok


def test_figure_cli_unknown_id():
    with pytest.raises(SystemExit):
        main(["figure", "fig9z"])


def test_figure_cli(tmp_path, capsys):
    assert main(["figure", "fig3b", "--output", str(tmp_path), "--points", "30", "--no-plot"]) == 0
    assert "fig3b: ok" in capsys.readouterr().out
    assert not list(tmp_path.glob("*.png"))


def test_figure_constants():
    assert figures.MU == math.sqrt(5 / 3) and figures.KAPPA == 0.25
    assert (figures.ALPHA, figures.BETA, figures.GAMMA) == (5.0, 2.0, 2.0)
    assert len(figures.FIGURE_IDS) == 12
    bg = figures.background("b")
    assert np.isclose(bg.fields(1.0)[1], 2 * math.sin(1.0))
