import csv
import json
import math

import numpy as np
import pytest

from lcperim import bodies as B
from lcperim import measures as M
from lcperim.cli import main


def run_cli(capsys, *argv, env=None):
    code = main(list(argv), env=env or {})
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gallery_list(capsys):
    code, out, _ = run_cli(capsys, "gallery", "list")
    assert code == 0
    assert "cube" in out and "simplex" in out


def test_gallery_dump_roundtrip(capsys):
    code, out, _ = run_cli(capsys, "gallery", "dump", "cube", "--n", "2")
    assert code == 0
    doc = json.loads(out)
    body = B.body_from_json(doc["body"])
    assert body.dim == 2
    mu = M.measure_from_json(doc["measure"])
    assert mu.dim == 2


def test_levelset_pnorm(capsys):
    code, out, _ = run_cli(
        capsys, "levelset", "--measure", '{"type":"pnorm","n":3,"p":2,"sigma":1.0}', "--t", "2"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["explicit"] and doc["body"]["type"] == "ball"
    assert doc["body"]["radius"] == pytest.approx(2.0)


def test_levelset_oracle_family(capsys):
    spec = '{"type":"product","factors":[{"type":"shifted_exp","rate":1.0,"shift":-1.0}]}'
    code, out, _ = run_cli(capsys, "levelset", "--measure", spec, "--t", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["explicit"] is False


def test_gamma_cube(capsys):
    code, out, _ = run_cli(
        capsys, "gamma", "--measure", "gallery:cube", "--n", "3", "--samples", "15000",
        "--family", "level_dilates", "--seed", "1",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["gamma_lower"] == pytest.approx(3 / math.sqrt(3.0), rel=1e-6)
    B.body_from_json(doc["body"])  # emitted JSON parses back


def test_gamma_intervals_1d(capsys):
    code, out, _ = run_cli(
        capsys, "gamma", "--measure", "gallery:shifted_exp", "--n", "1", "--family", "intervals"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["gamma_lower"] == pytest.approx(2.0, abs=1e-3)


def test_sample_csv(capsys, tmp_path):
    out_path = tmp_path / "pts.csv"
    code, _, _ = run_cli(
        capsys, "sample", "--measure", '{"type":"gaussian_std","n":2}', "--samples", "50",
        "--seed", "9", "--out", str(out_path),
    )
    assert code == 0
    rows = list(csv.reader(out_path.open()))
    assert rows[0] == ["x0", "x1"]
    assert len(rows) == 51
    float(rows[1][0])  # parses back


def test_seed_env_and_flag_priority(capsys, tmp_path):
    p1, p2, p3 = (tmp_path / f"s{i}.csv" for i in range(3))
    run_cli(capsys, "sample", "--measure", '{"type":"gaussian_std","n":1}', "--samples", "5",
            "--out", str(p1), env={"LCP_SEED": "7"})
    run_cli(capsys, "sample", "--measure", '{"type":"gaussian_std","n":1}', "--samples", "5",
            "--seed", "7", "--out", str(p2), env={"LCP_SEED": "99"})
    run_cli(capsys, "sample", "--measure", '{"type":"gaussian_std","n":1}', "--samples", "5",
            "--seed", "8", "--out", str(p3))
    assert p1.read_text() == p2.read_text()  # flag 7 beats env 99; env 7 alone matches
    assert p1.read_text() != p3.read_text()


def _tiny_suite(tmp_path):
    cfg = {
        "name": "tiny",
        "dimensions": [2],
        "measures": {"2": ["gaussian", "cube"]},
        "random_symmetric": 1,
        "random_general": 1,
        "samples": 8000,
    }
    p = tmp_path / "suite.json"
    p.write_text(json.dumps(cfg))
    return p


def test_check_deterministic_reports(capsys, tmp_path):
    suite = _tiny_suite(tmp_path)
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    c1, _, _ = run_cli(capsys, "check", "--suite", str(suite), "--seed", "7", "--out", str(r1))
    c2, _, _ = run_cli(capsys, "check", "--suite", str(suite), "--seed", "7", "--out", str(r2))
    assert c1 == 0 and c2 == 0
    assert r1.read_bytes() == r2.read_bytes()


def test_check_csv_schema(capsys, tmp_path):
    suite = _tiny_suite(tmp_path)
    out_csv = tmp_path / "r.csv"
    code, _, _ = run_cli(capsys, "check", "--suite", str(suite), "--csv", str(out_csv))
    assert code == 0
    rows = list(csv.reader(out_csv.open()))
    assert rows[0] == ["check_id", "n", "measure", "body", "lhs", "rhs", "slack", "margin", "verdict", "seed"]
    assert len(rows) > 10


def test_check_corruption_exit_code(capsys, tmp_path):
    suite = _tiny_suite(tmp_path)
    code, out, _ = run_cli(capsys, "check", "--suite", str(suite), "--corrupt-rhs", "0.001")
    assert code == 1
    assert "FAIL" in out


def test_check_bad_config_exit_2(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"dimensions": "nope"}))
    code, _, err = run_cli(capsys, "check", "--suite", str(p))
    assert code == 2
    assert "dimensions" in err


def test_bad_usage_exit_2(capsys):
    code, _, _ = run_cli(capsys, "gamma", "--measure", "not json")
    assert code == 2
    code, _, _ = run_cli(capsys, "nonsense")
    assert code == 2


def test_report_table_and_envelope(capsys, tmp_path):
    suite = _tiny_suite(tmp_path)
    rep = tmp_path / "rep.json"
    run_cli(capsys, "check", "--suite", str(suite), "--out", str(rep))
    env_csv = tmp_path / "envelope.csv"
    code, out, _ = run_cli(capsys, "report", str(rep), "--csv", str(env_csv))
    assert code == 0
    assert "check_id" in out and "summary:" in out
    rows = list(csv.reader(env_csv.open()))
    assert rows[0] == ["n", "gamma_lower", "cube_gamma", "sqrt2_n", "two_n", "four_n", "main_envelope"]
    assert len(rows) == 2  # single dimension in the tiny suite
    vals = {k: float(v) for k, v in zip(rows[0], rows[1])}
    assert vals["n"] == 2
    assert vals["cube_gamma"] == pytest.approx(2 / math.sqrt(3.0))
    assert vals["four_n"] == pytest.approx(8.0)


def test_report_empty_reports(capsys, tmp_path):
    rep = tmp_path / "empty.json"
    rep.write_text(json.dumps({"reports": []}))
    env_csv = tmp_path / "env.csv"
    code, _, _ = run_cli(capsys, "report", str(rep), "--csv", str(env_csv))
    assert code == 0
    rows = list(csv.reader(env_csv.open()))
    assert len(rows) == 1  # header only


def test_report_schema_mismatch(capsys, tmp_path):
    rep = tmp_path / "bad.json"
    rep.write_text(json.dumps({"not_reports": 1}))
    code, _, err = run_cli(capsys, "report", str(rep))
    assert code == 2
