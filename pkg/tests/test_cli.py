"""CLI: config validation, output files, determinism, exit codes."""

import json
import os

import pytest

from antitree import report_cli
from antitree.graph_oracle import MatchReport
from antitree.report_cli import ConfigError, load_config, main
from antitree.spectra import InternalConsistencyError


def write_config(tmp_path, name="cfg.json", **overrides):
    cfg = {
        "spec": {
            "spheres": {"kind": "polynomial", "q": 1},
            "lengths": {"kind": "power", "s": 2.0},
        },
        "truncation": 20,
    }
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def test_classify_verdicts_on_disk(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["classify", "--config", cfg, "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "classify.json").read_text())
    assert doc["schema_version"] == "1"
    r = doc["report"]
    assert r["self_adjoint"] == "holds"
    assert r["discrete"] == "holds"
    assert r["trace_class"] == "holds"
    assert r["positive_definite"] == "holds"
    assert r["ac_conclusion"] == "fails"
    assert doc["config"]["truncation"] == 20


def test_classify_rerun_byte_identical(tmp_path):
    cfg = write_config(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["classify", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["classify", "--config", cfg, "--out", str(out2)]) == 0
    assert (out1 / "classify.json").read_bytes() == (out2 / "classify.json").read_bytes()


def test_unknown_keys_rejected(tmp_path):
    path = write_config(tmp_path, outt_dir="x")
    assert main(["classify", "--config", path, "--out", str(tmp_path)]) == 1
    path = write_config(tmp_path, name="c2.json",
                        spec={"spheres": {"kind": "polynomial", "q": 1, "qq": 2},
                              "lengths": {"kind": "constant", "ell": 1.0}})
    with pytest.raises(ConfigError, match="spec.spheres.qq"):
        load_config(path)
    path = write_config(tmp_path, name="c3.json", solver={"hh": 0.1})
    with pytest.raises(ConfigError, match="solver.hh"):
        load_config(path)


def test_bad_values_rejected(tmp_path):
    path = write_config(tmp_path, truncation=0)
    with pytest.raises(ConfigError, match="truncation"):
        load_config(path)
    path = write_config(tmp_path, name="c2.json",
                        spec={"spheres": {"kind": "warp", "q": 1},
                              "lengths": {"kind": "constant", "ell": 1.0}})
    with pytest.raises(ConfigError, match="unknown kind"):
        load_config(path)
    path = write_config(tmp_path, name="c3.json", analyses=["classify", "nope"])
    with pytest.raises(ConfigError, match="analyses"):
        load_config(path)


def test_missing_config_file(tmp_path):
    assert main(["classify", "--config", str(tmp_path / "nope.json")]) == 1


def test_usage_error_exit_code():
    assert main(["frobnicate"]) == 1
    assert main([]) == 1


def test_spectrum_path_graph_only_sym_rows(tmp_path):
    cfg = write_config(
        tmp_path,
        spec={"spheres": {"kind": "alternating", "pattern": [1]},
              "lengths": {"kind": "constant", "ell": 1.0}},
        truncation=5,
        solver={"lambda_max": 40.0})
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "spectrum.csv").read_text().strip().split("\n")
    assert lines[0] == "lambda,multiplicity,block,generation"
    assert len(lines) > 1
    assert all(line.split(",")[2] == "sym" for line in lines[1:])


def test_verify_subcommand_passes(tmp_path):
    cfg = write_config(
        tmp_path,
        spec={"spheres": {"kind": "explicit", "values": [1, 2, 3, 2]},
              "lengths": {"kind": "constant", "ell": 1.0}},
        truncation=2,
        solver={"h": 0.005, "oracle_count": 10, "tol": 1e-3})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "verify.csv").read_text().strip().split("\n")
    assert len(lines) == 11
    assert all(line.endswith(",ok") for line in lines[1:])


def test_verify_failure_exit_code(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, truncation=2,
                       spec={"spheres": {"kind": "explicit", "values": [1, 2, 2, 2]},
                             "lengths": {"kind": "constant", "ell": 1.0}})

    def fake_verify(profile, h, m, tol):
        return MatchReport(False, (), (), "FAIL: forced")

    monkeypatch.setattr(report_cli.graph_oracle, "verify_decomposition", fake_verify)
    assert main(["verify", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_internal_consistency_exit_code(tmp_path, monkeypatch):
    cfg = write_config(tmp_path, solver={"lambda_max": 10.0})

    def boom(*a, **k):
        raise InternalConsistencyError("forced")

    monkeypatch.setattr(report_cli.spectra, "decomposed_spectrum", boom)
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 3


def test_weyl_divergent_volume_is_config_error(tmp_path):
    cfg = write_config(
        tmp_path,
        spec={"spheres": {"kind": "exponential", "beta": 2},
              "lengths": {"kind": "constant", "ell": 1.0}},
        truncation=8,
        solver={"weyl_lambdas": [50.0]})
    assert main(["weyl", "--config", cfg, "--out", str(tmp_path)]) == 1


def test_weyl_finite_volume_rows(tmp_path):
    cfg = write_config(
        tmp_path,
        spec={"spheres": {"kind": "polynomial", "q": 1},
              "lengths": {"kind": "power", "s": 4.0}},
        truncation=20,
        solver={"weyl_lambdas": [100.0, 400.0]})
    assert main(["weyl", "--config", cfg, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "weyl.csv").read_text().strip().split("\n")
    assert lines[0] == "lambda,count,ratio,target"
    assert len(lines) == 3
    target = float(lines[1].split(",")[3])
    assert target == pytest.approx(2.8469909700078207 / 3.141592653589793, rel=1e-9)


def test_gap_subcommand_rows(tmp_path):
    cfg = write_config(
        tmp_path,
        spec={"spheres": {"kind": "exponential", "beta": 2},
              "lengths": {"kind": "constant", "ell": 1.0}},
        truncation=12,
        solver={"n_list": [4, 8, 12]})
    assert main(["gap", "--config", cfg, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "gap.csv").read_text().strip().split("\n")
    assert lines[0] == "N,lambda0_upper,sandwich_lo,sandwich_hi"
    rows = [line.split(",") for line in lines[1:]]
    uppers = [float(r[1]) for r in rows]
    assert uppers == sorted(uppers, reverse=True)
    assert all(float(r[2]) <= float(r[1]) for r in rows)


def test_worker_env_var_parallel_gap(tmp_path, monkeypatch):
    monkeypatch.setenv("ANTITREE_WORKERS", "4")
    cfg = write_config(
        tmp_path,
        spec={"spheres": {"kind": "exponential", "beta": 2},
              "lengths": {"kind": "constant", "ell": 1.0}},
        truncation=10,
        solver={"n_list": [4, 6, 8, 10]})
    assert main(["gap", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert (tmp_path / "gap.csv").exists()


def test_out_dir_from_config(tmp_path):
    out = tmp_path / "nested" / "dir"
    cfg = write_config(tmp_path, out_dir=str(out))
    assert main(["classify", "--config", cfg]) == 0
    assert (out / "classify.json").exists()
