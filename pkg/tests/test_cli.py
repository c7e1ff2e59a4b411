"""Config parsing, artifact writing, exit codes and determinism."""

import json

import pytest

from mfspec.cli import (CommandConfig, PotentialConfig, SystemConfig,
                        main, parse_config, run, run_suite, serialize_config)
from mfspec.errors import ConfigError


def make_config(tmp_path, **overrides):
    cfg = {
        "system": {"name": "linear", "ratios": [0.5, 0.5]},
        "potential": {"name": "first_symbol", "values": [1, 0]},
        "command": {"name": "spectrum", "alphas": [0.3, 0.5]},
        "solver": {"n": 8},
        "output": {"path": str(tmp_path / "out.csv"), "format": "csv",
                   "precision": 12},
    }
    cfg.update(overrides)
    return cfg


def test_parse_minimal_config(tmp_path):
    cfg = parse_config(json.dumps(make_config(tmp_path)))
    assert cfg.system == SystemConfig(name="linear", ratios=(0.5, 0.5))
    assert cfg.potential == PotentialConfig(name="first_symbol",
                                            values=(1.0, 0.0))
    assert cfg.command == CommandConfig(name="spectrum", alphas=(0.3, 0.5))
    assert cfg.solver.n == 8
    assert cfg.output.precision == 12


def test_parse_mp_dim_config(tmp_path):
    raw = make_config(tmp_path,
                      system={"name": "manneville_pomeau", "beta": 0.5},
                      potential={"name": "coordinate"},
                      command={"name": "dim"})
    cfg = parse_config(json.dumps(raw))
    assert cfg.system.beta == 0.5
    assert cfg.command.name == "dim"
    assert cfg.command.alpha is None


def test_unknown_keys_named_in_error(tmp_path):
    raw = make_config(tmp_path)
    raw["system"] = {"name": "linear", "ratios_typo": [0.5, 0.5]}
    with pytest.raises(ConfigError, match="ratios_typo"):
        parse_config(json.dumps(raw))
    raw = make_config(tmp_path)
    raw["solver"] = {"n": 8, "depht": 3}
    with pytest.raises(ConfigError, match="depht"):
        parse_config(json.dumps(raw))


def test_type_errors_name_key_and_type(tmp_path):
    raw = make_config(tmp_path)
    raw["solver"] = {"n": "eight"}
    with pytest.raises(ConfigError, match="'n'.*integer"):
        parse_config(json.dumps(raw))
    raw = make_config(tmp_path)
    raw["command"] = {"name": "spectrum", "alphas": "0.3"}
    with pytest.raises(ConfigError, match="'alphas'.*number list"):
        parse_config(json.dumps(raw))


def test_missing_and_mismatched_sections(tmp_path):
    raw = make_config(tmp_path)
    del raw["command"]
    with pytest.raises(ConfigError, match="command"):
        parse_config(json.dumps(raw))
    raw = make_config(tmp_path,
                      system={"name": "example2", "ratios": [0.5, 0.5]})
    with pytest.raises(ConfigError, match="example2"):
        parse_config(json.dumps(raw))
    raw = make_config(tmp_path, command={"name": "validate"})
    with pytest.raises(ConfigError, match="suite"):
        parse_config(json.dumps(raw))


def test_serialize_round_trip(tmp_path):
    for overrides in (
            {},
            {"system": {"name": "manneville_pomeau", "beta": 0.75},
             "potential": {"name": "polynomial", "coefficients": [0, 1, -2]},
             "command": {"name": "dim", "alpha": 0.4}},
            {"potential": {"name": "indicator_branch", "branch": 1},
             "command": {"name": "validate", "suite": "moran"}},
    ):
        cfg = parse_config(json.dumps(make_config(tmp_path, **overrides)))
        assert parse_config(serialize_config(cfg)) == cfg


def test_run_writes_sorted_table_and_diagnostics(tmp_path):
    raw = make_config(tmp_path)
    raw["command"]["alphas"] = [0.5, 0.2, 0.35]
    cfg = parse_config(json.dumps(raw))
    assert run(cfg) == 0
    lines = (tmp_path / "out.csv").read_text().strip().splitlines()
    assert lines[0] == ("alpha,lower,upper,flag,n,rho,delta,lemma1_gap,"
                       "iterations,error")
    alphas = [float(line.split(",")[0]) for line in lines[1:]]
    assert alphas == sorted(alphas) == [0.2, 0.35, 0.5]
    diag = json.loads((tmp_path / "out.csv.diag.json").read_text())
    assert diag["command"] == "spectrum"
    assert len(diag["points"]) == 3
    assert all(p["iterations"] > 0 for p in diag["points"])


def test_run_is_byte_deterministic(tmp_path):
    raw = make_config(tmp_path,
                      system={"name": "manneville_pomeau", "beta": 0.5},
                      potential={"name": "coordinate"},
                      command={"name": "spectrum", "alphas": [0.0, 0.3, 0.6]})
    cfg = parse_config(json.dumps(raw))
    run(cfg)
    first = (tmp_path / "out.csv").read_bytes()
    first_diag = (tmp_path / "out.csv.diag.json").read_bytes()
    run(cfg)
    assert (tmp_path / "out.csv").read_bytes() == first
    assert (tmp_path / "out.csv.diag.json").read_bytes() == first_diag


def test_run_json_format(tmp_path):
    raw = make_config(tmp_path)
    raw["output"]["format"] = "json"
    raw["output"]["path"] = str(tmp_path / "out.json")
    cfg = parse_config(json.dumps(raw))
    assert run(cfg) == 0
    rows = json.loads((tmp_path / "out.json").read_text())
    assert [r["alpha"] for r in rows] == [0.3, 0.5]
    assert rows[1]["lower"] == pytest.approx(1.0, abs=1e-6)
    assert rows[0]["flag"] == 0


def test_run_partial_failure_exit_code(tmp_path):
    raw = make_config(tmp_path)
    raw["command"]["alphas"] = [0.5, 3.0]
    cfg = parse_config(json.dumps(raw))
    assert run(cfg) == 2
    lines = (tmp_path / "out.csv").read_text().strip().splitlines()
    good = lines[1].split(",")
    assert good[-1] == ""
    assert "outside achievable" in lines[2]


def test_run_attractor_dim_row(tmp_path):
    raw = make_config(tmp_path,
                      system={"name": "example2"},
                      potential={"name": "coordinate"},
                      command={"name": "dim"})
    cfg = parse_config(json.dumps(raw))
    assert run(cfg) == 0
    lines = (tmp_path / "out.csv").read_text().strip().splitlines()
    row = dict(zip(lines[0].split(","), lines[1].split(",")))
    assert row["alpha"] == ""
    assert float(row["upper"]) == pytest.approx(1.0, abs=1e-9)


def test_single_alpha_dim_row(tmp_path):
    raw = make_config(tmp_path, command={"name": "dim", "alpha": 0.3})
    cfg = parse_config(json.dumps(raw))
    assert run(cfg) == 0
    lines = (tmp_path / "out.csv").read_text().strip().splitlines()
    assert len(lines) == 2
    row = lines[1].split(",")
    assert float(row[0]) == 0.3
    assert float(row[1]) == pytest.approx(0.8812908992306927, abs=1e-6)


def test_validate_suites_exist():
    for suite, tol in (("besicovitch", 0.08), ("markov", 1e-10),
                       ("moran", 1e-6)):
        columns, rows = run_suite(suite, 8)
        assert rows
        err_col = columns[-1] if suite != "besicovitch" else "lower_error"
        assert all(r[err_col] <= tol for r in rows)


def test_main_validate_to_file(tmp_path):
    out = tmp_path / "suite.csv"
    code = main(["validate", "moran", "--n", "6", "--output", str(out)])
    assert code == 0
    assert out.read_text().startswith("n,s_n,reference,abs_error")


def test_main_run_and_dim(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(make_config(tmp_path)))
    assert main(["run", str(path)]) == 0
    # dim forces the command regardless of the config's command block
    assert main(["dim", str(path)]) == 0
    lines = (tmp_path / "out.csv").read_text().strip().splitlines()
    assert len(lines) == 2
    assert lines[1].split(",")[0] == ""


def test_main_reports_fatal_errors(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("{not json")
    assert main(["run", str(path)]) == 1
    assert main(["run", str(tmp_path / "missing.json")]) == 1


def test_thread_count_does_not_change_output(tmp_path, monkeypatch):
    raw = make_config(tmp_path)
    raw["command"]["alphas"] = [0.2, 0.4, 0.6, 0.8]
    cfg = parse_config(json.dumps(raw))
    run(cfg, workers=1)
    serial = (tmp_path / "out.csv").read_bytes()
    monkeypatch.setenv("MFSPEC_THREADS", "4")
    run(cfg)
    assert (tmp_path / "out.csv").read_bytes() == serial
