import csv
import io
import json

import mpmath
import pytest
from mpmath import mpf

from macpoly.cli import DEFAULT_GRID, main, render_reports
from macpoly.identities import verify_identity
from macpoly.specfun import PrecisionContext
from macpoly.weight_measure import Params

CTX = PrecisionContext()
POINT = ["--nu", "0.5", "--t", "1", "--lambda", "0.4"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_single_identity(capsys):
    code, out, _ = run(capsys, "verify", "--id", "TODA_3_8", *POINT, "--n", "3", "--no-timestamp")
    doc = json.loads(out)
    assert code == 0
    assert list(doc) == ["meta", "reports", "summary"]
    assert set(doc["meta"]) == {"bits", "tol_algebraic", "tol_fd", "fd_step"}
    (rep,) = doc["reports"]
    assert list(rep) == ["id", "nu", "t", "lambda", "n", "residual", "tolerance", "kind",
                         "pass", "notes"]
    assert rep["pass"] is True and mpf(rep["residual"]) < 1e-12
    assert doc["summary"] == {"total": 1, "passed": 1, "failed": 0, "report_mode": 0}


def test_timestamp_present_by_default(capsys):
    _, out, _ = run(capsys, "verify", "--id", "L_3_4", *POINT, "--n", "1")
    assert "timestamp" in json.loads(out)["meta"]


def test_failing_identity_sets_exit_code(capsys):
    code, out, err = run(capsys, "verify", "--id", "L_3_11", *POINT, "--n", "2")
    assert code == 1 and "FAIL L_3_11" in err
    assert json.loads(out)["summary"]["failed"] == 1


def test_report_mode_does_not_fail_unless_strict(capsys):
    args = ["verify", "--id", "THM3_2_43", *POINT, "--n", "3"]
    assert run(capsys, *args)[0] == 0
    assert run(capsys, *args, "--report-mode-strict")[0] == 1


def test_moments_zeroth_closed_form(capsys):
    code, out, _ = run(capsys, "moments", "--n", "0", "--nu", "0", "--t", "1", "--lambda", "0.5")
    assert code == 0
    row = json.loads(out)["rows"][0]
    with CTX.working():
        expected = 2 * mpmath.sqrt(mpf("0.5")) * mpmath.besselk(1, 2 * mpmath.sqrt(mpf("0.5"))) / mpf("0.5")
        assert abs(mpf(row["power_moment"]) - expected) < mpf(10) ** -70


def test_recurrence_meixner_annotation(capsys):
    code, out, _ = run(capsys, "recurrence", "--t", "0", "--nu", "0.5", "--lambda", "0.3", "--N", "4")
    doc = json.loads(out)
    assert code == 0 and doc["meta"]["meixner-limit"] == "match"
    assert len(doc["rows"]) == 4


def test_recurrence_q_family_csv(capsys):
    code, out, _ = run(capsys, "recurrence", "--family", "q", *POINT, "--N", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["n", "q_{n+1}", "h_n", "disagreement"]
    assert all(mpf(r["disagreement"]) < 1e-25 for r in rows)


def test_quad_and_rho(capsys):
    code, out, _ = run(capsys, "quad", *POINT, "--N", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 3
    code, out, _ = run(capsys, "rho", "--mu", "0.5", "--t", "1", "--format", "csv")
    value = mpf(list(csv.DictReader(io.StringIO(out)))[0]["value"])
    assert abs(value - mpmath.sqrt(mpmath.pi) * mpmath.exp(-2)) < 1e-15


@pytest.mark.parametrize("argv", [
    ["verify", "--nu", "0.5", "--t", "1", "--lambda", "1.5"],
    ["verify", "--nu", "0.5", "--t", "1"],
    ["verify", "--id", "NOPE", *POINT],
    ["verify", *POINT, "--n", "12"],
    ["verify", *POINT, "--bits", "16"],
    ["rho", "--t", "1"],
    ["rho", "--mu", "-1", "--t", "0"],
    ["sweep", "--grid", "/nonexistent/grid.json"],
])
def test_configuration_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "configuration error" in err


def test_breakdown_exit_code(capsys):
    code, _, err = run(capsys, "recurrence", *POINT, "--N", "60", "--bits", "64",
                       "--tol-algebraic", "1e-15", "--tol-fd", "1e-8", "--fd-step", "1e-4")
    assert code == 3 and "breakdown" in err


def test_config_document_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"ids": ["L_3_4"], "n": 2, "grid": [[0.5, 1, 0.4], [0, 4, 0.2]],
                               "format": "csv"}))
    code, out, _ = run(capsys, "sweep", "--config", str(cfg))
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and [r["nu"] for r in rows] == ["0.0", "0.5"]
    code, out, _ = run(capsys, "sweep", "--config", str(cfg), "--n", "1", "--format", "json",
                       "--no-timestamp")
    doc = json.loads(out)
    assert {r["n"] for r in doc["reports"]} == {1}


def test_grid_file_and_output_path(tmp_path, capsys):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps([{"nu": 1.5, "t": 0.25, "lambda": 0.8}]))
    out = tmp_path / "report.json"
    code, _, _ = run(capsys, "sweep", "--grid", str(grid), "--id", "TODA_3_8,L_3_4", "--n", "2",
                     "--out", str(out))
    doc = json.loads(out.read_text())
    assert code == 0 and [r["id"] for r in doc["reports"]] == ["L_3_4", "TODA_3_8"]


def test_empty_report_document():
    doc = json.loads(render_reports([], "json", CTX))
    assert doc["reports"] == [] and doc["summary"]["total"] == 0
    assert render_reports([], "csv", CTX).splitlines() == [
        "id,nu,t,lambda,n,residual,tolerance,kind,pass,notes"]


def test_serialization_round_trip():
    r = verify_identity("SUM_2_26", Params(0.5, 1, 0.4), 2, CTX)
    doc = json.loads(render_reports([r], "json", CTX))
    with CTX.working():
        assert mpf(doc["reports"][0]["residual"]) == r.residual
    row = next(csv.DictReader(io.StringIO(render_reports([r], "csv", CTX))))
    assert row["notes"] == r.notes and row["pass"] == "true"
    with CTX.working():
        assert mpf(row["residual"]) == r.residual


def test_summary_counts_mixed_results():
    p = Params(0.5, 1, 0.4)
    reports = [verify_identity(i, p, 2, CTX) for i in ("L_3_4", "L_3_11", "THM3_2_43")]
    s = json.loads(render_reports(reports, "json", CTX))["summary"]
    assert s == {"total": 3, "passed": 1, "failed": 2, "report_mode": 1}


def test_workers_do_not_change_output(tmp_path, capsys):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps([[0.5, 1, 0.4], [-0.5, 0.25, 0.2]]))
    outs = []
    for w in ("1", "2"):
        path = tmp_path / f"w{w}.csv"
        run(capsys, "sweep", "--grid", str(grid), "--id", "L_3_4,COR2_CNN1", "--format", "csv",
            "--workers", w, "--out", str(path))
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_default_grid():
    assert len(DEFAULT_GRID) == 27
    assert {float(p.nu) for p in DEFAULT_GRID} == {-0.5, 0.0, 1.5}
