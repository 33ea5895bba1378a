"""Tests for the command line front-end: configs, artifacts, exit codes."""

import importlib.resources
import json

import jsonschema
import pytest

from surfint import cli
from surfint.errors import ParseError, ValidationError


def write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc, indent=1))
    return str(path)


def run_cli(tmp_path, task, doc, out="out"):
    cfg = write_config(tmp_path, doc, name=f"{task}-{out}.json")
    out_dir = tmp_path / out
    code = cli.main([task, "--config", cfg, "--out", str(out_dir)])
    return code, out_dir


def load_schema():
    res = importlib.resources.files("surfint").joinpath("schemas/report.schema.json")
    return json.loads(res.read_text())


INTERVAL_DOC = {
    "task": "interval",
    "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": [0.0, 0.0]},
    "geometry": {"d": 10.0},
}


def test_parse_minimal_interval_config():
    cfg = cli.parse_config(json.dumps(INTERVAL_DOC))
    assert cfg.task == "interval"
    assert cfg.coupling == (2.0, 0.0, 0j)
    assert cfg.geometry == {"d": 10.0}
    assert len(cfg.sha256) == 64


def test_parse_rejects_unknown_keys_all_at_once():
    doc = {
        "task": "interval",
        "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": [0.0, 0.0], "extra": 1},
        "geometry": {"d": 10.0, "dd": 3.0},
        "typo_block": {},
    }
    with pytest.raises(ValidationError) as exc:
        cli.parse_config(json.dumps(doc))
    msg = str(exc.value)
    assert "coupling.extra" in msg
    assert "geometry.dd" in msg
    assert "typo_block" in msg


def test_parse_rejects_missing_geometry_field():
    doc = {"task": "interval",
           "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": [0.0, 0.0]},
           "geometry": {}}
    with pytest.raises(ValidationError, match="geometry.d"):
        cli.parse_config(json.dumps(doc))


def test_parse_rejects_scalar_gamma():
    doc = {"task": "interval",
           "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": 0.0},
           "geometry": {"d": 10.0}}
    with pytest.raises(ParseError, match=r"\[re, im\] pair"):
        cli.parse_config(json.dumps(doc))
    doc["coupling"]["gamma"] = [1.0, 2.0, 3.0]
    with pytest.raises(ParseError):
        cli.parse_config(json.dumps(doc))


def test_parse_reports_json_position():
    with pytest.raises(ParseError, match="line 1"):
        cli.parse_config('{"task": "interval",,}')
    with pytest.raises(ParseError, match="object"):
        cli.parse_config('[1, 2]')


def test_parse_rejects_unknown_task():
    with pytest.raises(ValidationError, match="unknown task"):
        cli.parse_config(json.dumps({"task": "eigensolve"}))
    with pytest.raises(ValidationError, match="task"):
        cli.parse_config(json.dumps({}))


def test_parse_validates_sweep_parameter_against_geometry():
    doc = {
        "task": "sweep",
        "coupling": {"alpha": 1.0, "beta": 0.0, "gamma": [0.0, 0.0]},
        "geometry": {"d": 6.0},
        "sweep": {"parameter": "R", "start": 0.5, "stop": 1.0, "steps": 3},
    }
    with pytest.raises(ValidationError, match="circle or sphere"):
        cli.parse_config(json.dumps(doc))
    doc["sweep"]["parameter"] = "volume"
    with pytest.raises(ValidationError, match="sweep.parameter"):
        cli.parse_config(json.dumps(doc))


def test_interval_run_writes_single_row_spectrum(tmp_path):
    code, out = run_cli(tmp_path, "interval", INTERVAL_DOC)
    assert code == 0
    lines = (out / "spectrum.csv").read_text().splitlines()
    assert lines[0].startswith("# config_sha256=")
    assert lines[1] == "k_index,eigenvalue,k_value_if_interval,residual"
    assert len(lines) == 3
    cells = lines[2].split(",")
    lam = float(cells[1])
    assert cells[0] == "1"
    assert abs(lam + 1.0) <= 1e-8 and lam <= -1.0
    assert float(cells[3]) < 1e-10
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["N"] == 1
    assert rep["config_sha256"] == lines[0].split("=", 1)[1]


def test_reports_validate_against_shipped_schema(tmp_path):
    schema = load_schema()
    docs = [
        ("interval", INTERVAL_DOC),
        ("m-infinity", {"task": "m-infinity",
                        "coupling": {"alpha": 1.0, "beta": 4.0, "gamma": [0.0, 0.0]}}),
        ("radial-oracle", {"task": "radial-oracle",
                           "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": [0.0, 0.0]},
                           "geometry": {"R": 1.0}}),
        ("certify", {"task": "certify",
                     "coupling": {"alpha": 0.0, "beta": 1.0, "gamma": [0.0, 0.0]},
                     "geometry": {"kind": "circle", "R": 1.0}}),
        ("sweep", {"task": "sweep",
                   "coupling": {"alpha": 1.0, "beta": 0.0, "gamma": [0.0, 0.0]},
                   "geometry": {"kind": "sphere", "R": 1.0},
                   "sweep": {"parameter": "alpha", "start": 0.9, "stop": 1.1,
                             "steps": 5}}),
    ]
    for i, (task, doc) in enumerate(docs):
        code, out = run_cli(tmp_path, task, doc, out=f"out{i}")
        assert code == 0, (task, code)
        rep = json.loads((out / "report.json").read_text())
        jsonschema.validate(rep, schema)


def test_rerun_is_bit_identical(tmp_path):
    code1, out1 = run_cli(tmp_path, "interval", INTERVAL_DOC, out="a")
    code2, out2 = run_cli(tmp_path, "interval", INTERVAL_DOC, out="b")
    assert code1 == code2 == 0
    for name in ("spectrum.csv", "report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_error_run_writes_error_json(tmp_path):
    doc = {"task": "interval",
           "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": [0.0, 0.0]},
           "geometry": {}}
    code, out = run_cli(tmp_path, "interval", doc)
    assert code == 2
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "ValidationError"
    assert "geometry.d" in err["detail"]
    assert len(err["config_sha256"]) == 64
    assert not (out / "report.json").exists()


def test_task_command_mismatch_exits_two(tmp_path):
    code, out = run_cli(tmp_path, "sphere", INTERVAL_DOC)
    assert code == 2
    err = json.loads((out / "error.json").read_text())
    assert "does not match" in err["detail"]


def test_solver_failure_exits_two(tmp_path):
    doc = {"task": "radial-oracle",
           "coupling": {"alpha": 2.0, "beta": 1.0, "gamma": [0.0, 0.0]},
           "geometry": {"R": 1.0}}
    code, out = run_cli(tmp_path, "radial-oracle", doc)
    assert code == 2
    err = json.loads((out / "error.json").read_text())
    assert "delta" in err["detail"]


def test_compare_suite_passes_and_exits_zero(tmp_path):
    code, out = run_cli(tmp_path, "compare", {"task": "compare"})
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["verdict"] == "pass"
    assert rep["results"]["n_cases"] == 20
    assert all(c["ordering_ok"] for c in rep["results"]["cases"])
    jsonschema.validate(rep, load_schema())


def test_compare_custom_case(tmp_path):
    doc = {"task": "compare",
           "compare": {"cases": [{
               "case_id": "beta_reciprocal", "alpha": 1.0, "beta": 2.0,
               "gamma": [0.0, 0.0], "reference": 2.0, "geometry": "interval",
               "params": {"d": 6.0}}]}}
    code, out = run_cli(tmp_path, "compare", doc)
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["n_cases"] == 1


def test_compare_rejects_hypothesis_violation(tmp_path):
    doc = {"task": "compare",
           "compare": {"cases": [{
               "case_id": "alpha_direct", "alpha": 2.0, "beta": 1.0,
               "gamma": [0.0, 0.0], "reference": 5.0, "geometry": "interval",
               "params": {"d": 6.0}}]}}
    code, out = run_cli(tmp_path, "compare", doc)
    assert code == 2
    err = json.loads((out / "error.json").read_text())
    assert "reference <= alpha" in err["detail"]


def test_certify_unconfirmed_existence_exits_three(tmp_path):
    # the weak 2-D delta state is exponentially shallow, so the numeric
    # count cannot confirm the prediction and the verdict fails
    doc = {"task": "certify",
           "coupling": {"alpha": 0.1, "beta": 0.0, "gamma": [0.0, 0.0]},
           "geometry": {"kind": "circle", "R": 1.0}}
    code, out = run_cli(tmp_path, "certify", doc)
    assert code == 3
    rep = json.loads((out / "report.json").read_text())
    assert rep["verdict"] == "fail"
    assert rep["results"]["criteria"]["attractive_trace_2d"]["consistent"] is False
    jsonschema.validate(rep, load_schema())


def test_sweep_threshold_transition_at_one(tmp_path):
    doc = {"task": "sweep",
           "coupling": {"alpha": 1.0, "beta": 0.0, "gamma": [0.0, 0.0]},
           "geometry": {"kind": "sphere", "R": 1.0},
           "sweep": {"parameter": "alpha", "start": 0.9, "stop": 1.1,
                     "steps": 21}}
    code, out = run_cli(tmp_path, "sweep", doc)
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("# config_sha256=")
    assert lines[1] == "# parameter=alpha"
    assert lines[2] == "value,lambda_1,lambda_2,lambda_3,N,m_A"
    counts = {}
    for row in lines[3:]:
        cells = row.split(",")
        counts[round(float(cells[0]), 10)] = int(cells[-2])
    assert counts[0.9] == 0 and counts[1.0] == 0
    assert counts[1.01] == 1 and counts[1.1] == 1
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["backend"] == "sphere-delta-exact"


def test_sweep_interval_backend(tmp_path):
    doc = {"task": "sweep",
           "coupling": {"alpha": 0.0, "beta": 1.0, "gamma": [0.0, 0.0]},
           "geometry": {"d": 6.0},
           "sweep": {"parameter": "alpha", "start": 0.0, "stop": 2.0,
                     "steps": 5},
           "solver": {"eigen_count": 2}}
    code, out = run_cli(tmp_path, "sweep", doc)
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[2] == "value,lambda_1,lambda_2,N,m_A"
    last = lines[-1].split(",")
    # alpha = 2, beta = 1 supports two negative eigenvalues at d = 6
    assert int(last[-2]) == 2
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["backend"] == "interval-exact"


def test_sweep_grid_backend_on_circle(tmp_path):
    doc = {"task": "sweep",
           "coupling": {"alpha": 0.0, "beta": 2.0, "gamma": [0.0, 0.0]},
           "geometry": {"kind": "circle", "R": 1.0, "R_out": 8.0},
           "sweep": {"parameter": "beta", "start": 1.0, "stop": 2.0,
                     "steps": 3},
           "solver": {"n_grid": 256, "eigen_count": 1}}
    code, out = run_cli(tmp_path, "sweep", doc)
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["backend"] == "radial-grid"
    assert all(p["N"] >= 1 for p in rep["results"]["points"])


def test_sweep_exact_backend_refuses_mismatch(tmp_path):
    doc = {"task": "sweep",
           "coupling": {"alpha": 0.0, "beta": 2.0, "gamma": [0.0, 0.0]},
           "geometry": {"kind": "circle", "R": 1.0},
           "sweep": {"parameter": "beta", "start": 1.0, "stop": 2.0,
                     "steps": 3},
           "solver": {"backend": "exact"}}
    code, out = run_cli(tmp_path, "sweep", doc)
    assert code == 2
    err = json.loads((out / "error.json").read_text())
    assert "backend" in err["detail"]


def test_threads_env_cap(tmp_path, monkeypatch):
    doc = {"task": "sweep",
           "coupling": {"alpha": 1.0, "beta": 0.0, "gamma": [0.0, 0.0]},
           "geometry": {"kind": "sphere", "R": 1.0},
           "sweep": {"parameter": "alpha", "start": 0.9, "stop": 1.1,
                     "steps": 5}}
    code, out1 = run_cli(tmp_path, "sweep", doc, out="free")
    assert code == 0
    monkeypatch.setenv("SURFINT_THREADS", "1")
    code, out2 = run_cli(tmp_path, "sweep", doc, out="capped")
    assert code == 0
    assert (out1 / "sweep.csv").read_bytes() == (out2 / "sweep.csv").read_bytes()
    monkeypatch.setenv("SURFINT_THREADS", "zero")
    code, out3 = run_cli(tmp_path, "sweep", doc, out="broken")
    assert code == 2


def test_m_infinity_report(tmp_path):
    doc = {"task": "m-infinity",
           "coupling": {"alpha": 1.0, "beta": 4.0, "gamma": [0.0, 0.0]}}
    code, out = run_cli(tmp_path, "m-infinity", doc)
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["m_infinity"] == pytest.approx(-0.25, abs=1e-15)
    matched = rep["results"]["matched_strength"]
    assert matched["applicable"] is True
    assert matched["interval_check"]["status"] == "ok"
    assert not (out / "spectrum.csv").exists()


def test_radial_oracle_exact_value(tmp_path):
    doc = {"task": "radial-oracle",
           "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": [0.0, 0.0]},
           "geometry": {"R": 1.0}}
    code, out = run_cli(tmp_path, "radial-oracle", doc)
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["N"] == 1
    assert rep["results"]["eigenvalues"][0] == pytest.approx(
        -0.6349095705463543, abs=1e-10)


def test_sphere_task_matches_oracle(tmp_path):
    doc = {"task": "sphere",
           "coupling": {"alpha": 2.0, "beta": 0.0, "gamma": [0.0, 0.0]},
           "geometry": {"R": 1.0, "R_out": 12.0},
           "solver": {"n_grid": 512}}
    code, out = run_cli(tmp_path, "sphere", doc)
    assert code == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["results"]["eigenvalues"][0] == pytest.approx(
        -0.6349095705463543, abs=1e-3)
    jsonschema.validate(rep, load_schema())


def test_output_dir_from_config(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    doc = dict(INTERVAL_DOC)
    doc["output"] = {"dir": "from_config"}
    cfg = write_config(tmp_path, doc)
    code = cli.main(["interval", "--config", cfg])
    assert code == 0
    assert (tmp_path / "from_config" / "report.json").exists()


def test_missing_config_file_exits_two(tmp_path, capsys):
    code = cli.main(["interval", "--config", str(tmp_path / "absent.json")])
    assert code == 2
    assert "cannot read config" in capsys.readouterr().err
