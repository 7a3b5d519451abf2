import json
import subprocess
import sys

import pytest

from monop.cli import main
from monop.pipeline import RunConfig, config_hash, run_analyze, run_catalog

CLI = [sys.executable, "-m", "monop"]


def run(*args, cwd=None):
    return subprocess.run(CLI + list(args), capture_output=True, text=True, cwd=cwd)


def test_analyze_volterra_exit_zero():
    p = run("analyze", "volterra", "--N", "8,16")
    assert p.returncode == 0, p.stderr
    report = json.loads(p.stdout)
    (r,) = report["results"]
    assert r["verdict"]["class"] == "Compact"
    assert report["schema_version"] == "1" and len(report["config_hash"]) == 64
    assert "timestamp" not in p.stdout


def test_analyze_t1_fast_path():
    p = run("analyze", "t1", "--no-oracle")
    r = json.loads(p.stdout)["results"][0]
    assert p.returncode == 0
    assert (r["verdict"]["class"], r["verdict"]["tag"]) == ("Unbounded", "not_self_map")
    assert "b + (1 - a)/2" in r["symbols"]["intercept_note"]


@pytest.mark.parametrize(
    "spec, err",
    [
        ('{"coeff_expr": "", "a": 1, "b": 0}', "SpecError: empty coefficient rule"),
        ('{"coeff_expr": "1/(n+1", "a": 1, "b": 0}', "expected ')'"),
        ('{"coeff_expr": "1", "a": 1, "b": -1}', "SpecError"),
        ('{"coeff_expr": "1", "a": 1, "b": 0, "h_expr": "sin(s)"}', "unknown"),
        ("not json", "not valid JSON"),
    ],
)
def test_invalid_input_exit_one(spec, err):
    p = run("analyze", "--spec", spec)
    assert p.returncode == 1
    assert err in p.stderr


def test_inconclusive_exit_two():
    p = run("analyze", "--spec", '{"name": "x", "coeff_expr": "1/(n+1)", "a": 1, "b": 1}', "--no-oracle")
    assert p.returncode == 2
    assert json.loads(p.stdout)["results"][0]["verdict"]["tag"] == "interpolation_only"


def test_catalog_only_and_windows(tmp_path):
    out = tmp_path / "r.json"
    p = run("catalog", "--only", "volterra,hardy", "--emit-windows", str(tmp_path / "w"), "--json", str(out), "--no-oracle")
    assert p.returncode == 0, p.stderr
    report = json.loads(out.read_text())
    assert [r["name"] for r in report["table"]] == ["hardy", "volterra"]
    assert all(r["match"] for r in report["table"])
    for name in ("hardy", "volterra"):
        assert (tmp_path / "w" / f"{name}.csv").read_text().startswith("t,L,mass,ratio\n")


def test_catalog_unknown_entry():
    assert run("catalog", "--only", "nope").returncode == 1


def test_oracle_subcommand():
    p = run("oracle", "hardy", "--N", "1")
    (r,) = json.loads(p.stdout)["results"]
    assert r["truncations"][0]["singular_values"] == [1.0]
    p = run("oracle", "volterra", "--N", "80")
    assert p.returncode == 1 and "cap of 64" in p.stderr
    p = run("oracle", "volterra", "--N", "80", "--mode", "float")
    assert p.returncode == 0


def test_oracle_t2_growth_flagged():
    p = run("oracle", "t2", "--N", "8,16,32,64")
    assert json.loads(p.stdout)["results"][0]["trend"] == "growing"


def test_windows_stdout():
    p = run("windows", "shift")
    lines = p.stdout.splitlines()
    assert p.returncode == 0 and lines[0] == "t,L,mass,ratio" and len(lines) > 100


def test_spec_file_and_config(tmp_path):
    spec = tmp_path / "op.json"
    spec.write_text(json.dumps({"name": "t3copy", "coeff_expr": "1/(2*n+2)", "a": 2, "b": 2, "h_expr": "1/(2*s+1)"}))
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"oracle": {"N": [4, 8]}, "decide": {"tol_vanish": 1e-3}}))
    p = run("analyze", str(spec), "--config", str(cfg))
    assert p.returncode == 0, p.stderr
    r = json.loads(p.stdout)
    assert r["results"][0]["verdict"]["class"] == "Compact"
    assert r["config"]["oracle"]["N"] == [4, 8]


def test_bad_config_keys(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["catalog", "--config", str(cfg)]) == 1


def test_config_hash_ignores_workers_and_order():
    a = RunConfig.from_dict({"only": ["volterra", "hardy"], "workers": 1})
    b = RunConfig.from_dict({"only": ["hardy", "volterra"], "workers": 4})
    assert a.hash == b.hash
    assert config_hash({"x": 1, "y": [1, 2]}) == config_hash({"y": [1, 2], "x": 1})


def test_reports_independent_of_workers():
    one = run_catalog(RunConfig.from_dict({"oracle": {"N": [8, 16]}, "workers": 1}))
    many = run_catalog(RunConfig.from_dict({"oracle": {"N": [8, 16]}, "workers": 7}))
    assert json.dumps(one, sort_keys=True) == json.dumps(many, sort_keys=True)


def test_report_fields():
    r = run_analyze(RunConfig.from_dict({"only": ["shift"]}))["results"][0]
    ev = r["verdict"]["evidence"]
    assert ev["vanishing"]["result"] == "not_vanishing"
    assert ev["naive_vanishing"] is True
    assert {"carleson_sup", "carleson_argmax", "band_sup"} <= set(ev)
    assert r["oracle"]["label"] == "evidence"
    assert r["oracle"]["agrees_with_verdict"] is True
