"""Acceptance gate: one check per criterion, with tolerances pinned below.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per criterion
is printed in the terminal summary.  Grid-point tests share a module-scoped
fixture, so pytest runs all criteria for one point before moving on and the
per-point caches are reused.
"""
import json
import subprocess
import sys
from pathlib import Path

import mpmath
import pytest
from mpmath import mpf

from _acceptance import record
from macpoly.cli import DEFAULT_GRID, render_reports
from macpoly.identities import CATALOG, applicable, verify_identity
from macpoly.moments import factorial_moment, moment_bruteforce, power_moment
from macpoly.opoly import (
    build_recurrence,
    build_recurrence_chebyshev,
    build_recurrence_stieltjes,
    family_from_table,
    gauss_rule,
    gram_residual,
    meixner_table,
)
from macpoly.specfun import PrecisionContext
from macpoly.weight_measure import Params, truncate_measure

CTX = PrecisionContext(bits=256, tol_algebraic=1e-30, tol_fd=1e-12, fd_step=1e-10)

N_MAX = 6                 # identities and moments: n <= 6
TOL_MOMENT = 1e-30        # criterion 1, relative
TOL_TABLE = 1e-25         # criterion 2, times (1 + |value|)
N_TABLE = 10
GRAM_FACTOR, N_GRAM = 10, 8
TOL_MEIXNER, N_MEIXNER = 1e-25, 8
TOL_EXACT = 1e-25         # criterion 5
TOL_FD = 1e-12            # criterion 6
RATIO_BAND = (8.0, 24.0)  # 16 +- 50%
TOL_COR1, N_COR1 = 1e-20, 3
TOL_GAUSS, N_GAUSS = 1e-25, 6

EXACT_IDS = ["RHO_1_10", "PEARSON_1_17", "CD_1_16", "COR2_CNN1", "D_NN1", "L_3_11", "NU_3_15",
             "NU_3_20", "NU_3_22", "NU_3_23", "NU_3_28", "NU_3_29", "NU_3_30", "NU_3_31",
             "NU_3_32", "BWD_3_35", "BWD_3_36", "Q_4_14"]
FD_IDS = ["DT_1_18", "DL_1_19", "PDE_1_20", "ODE_1_21", "C_2_20", "SUM_2_26", "SUM_2_29",
          "SUM_2_30", "SUM_2_31", "SUM_2_32", "SUM_2_40", "L_3_2_3_5", "L_3_4", "L_3_6", "L_3_7",
          "TODA_3_8", "TODA_3_9", "L_3_10", "L_3_12", "Q_4_11", "QTODA_4_12", "QTODA_4_13"]
REPORT_IDS = ["D_2_41", "THM3_2_43", "THM3_2_43_ALT"]


def _label(p):
    return f"nu={p.nu},t={p.t},lam={p.lam}"


@pytest.fixture(scope="module", params=DEFAULT_GRID, ids=_label)
def point(request):
    return request.param


def _noise_floor(h):
    # below this a Richardson residual is rounding noise and its h-scaling is meaningless
    return mpmath.ldexp(1, -(CTX.bits - 32)) / h


def _check(criterion, ok, what, failures):
    record(criterion, ok, what)
    if not ok:
        failures.append(what)


def test_criterion_1_moments(point):
    failures = []
    with CTX.working():
        for n in range(N_MAX + 1):
            for kind, closed in (("power", power_moment(n, point, CTX)),
                                 ("factorial", factorial_moment(n, point, CTX))):
                brute = moment_bruteforce(n, point, kind, CTX)
                _check(1, abs(closed - brute) <= TOL_MOMENT * abs(closed),
                       f"{kind} n={n}", failures)
    assert not failures, failures


def test_criterion_2_constructions_agree(point):
    cheb = build_recurrence_chebyshev(point, N_TABLE, CTX)
    stie = build_recurrence_stieltjes(truncate_measure(point, N_TABLE, CTX), N_TABLE, CTX)
    failures = []
    with CTX.working():
        for name, xs, ys in (("A", cheb.A[1:], stie.A[1:]), ("B", cheb.B, stie.B)):
            for i, (x, y) in enumerate(zip(xs, ys)):
                _check(2, abs(x - y) <= TOL_TABLE * (1 + abs(x)), f"{name}[{i}]", failures)
    assert not failures, failures


def test_criterion_3_orthonormality(point):
    m = truncate_measure(point, N_GRAM, CTX)
    with CTX.working():
        fam = family_from_table(build_recurrence(point, N_GRAM, CTX))
        bound = GRAM_FACTOR * (mpf(CTX.tol_algebraic) + m.tail_bound / m.weights[0])
        res = gram_residual(fam, m, N_GRAM)
    record(3, res <= bound, _label(point))
    assert res <= bound, (res, bound)


def test_criterion_5_exact_identities(point):
    failures = []
    for id_ in EXACT_IDS:
        for n in range(N_MAX + 1):
            if not applicable(id_, point, n):
                continue
            r = verify_identity(id_, point, n, CTX)
            _check(5, r.residual <= TOL_EXACT, id_, failures)
    assert not failures, sorted(set(failures))


def test_criterion_6_finite_difference_identities(point):
    failures = []
    h = CTX.step()
    for id_ in FD_IDS:
        for n in range(N_MAX + 1):
            if not applicable(id_, point, n):
                continue
            r = verify_identity(id_, point, n, CTX)
            ok = r.residual <= TOL_FD
            if CATALOG[id_].kind == "finite-difference" and r.residual > _noise_floor(h):
                ratio = r.residual / r.residual_half_step
                ok = ok and RATIO_BAND[0] <= ratio <= RATIO_BAND[1]
            _check(6, ok, id_, failures)
    assert not failures, sorted(set(failures))


def test_criterion_7_corollary1(point):
    failures = []
    for n in range(1, N_COR1 + 1):
        r = verify_identity("COR1_2_10", point, n, CTX)
        _check(7, r.residual <= TOL_COR1, f"n={n}", failures)
    assert not failures, failures


def test_criterion_8_report_mode(point):
    reports = [verify_identity(id_, point, n, CTX)
               for id_ in REPORT_IDS for n in range(N_MAX + 1) if applicable(id_, point, n)]
    doc = json.loads(render_reports(reports, "json", CTX))
    ids = {r["id"] for r in doc["reports"]}
    ok = (ids == set(REPORT_IDS) and all(r.report_mode for r in reports)
          and doc["summary"]["report_mode"] == len(reports)
          and all(r["residual"] and r["notes"].startswith("report-mode") for r in doc["reports"]))
    record(8, ok, _label(point))
    assert ok


def test_criterion_9_gauss_rules(point):
    failures = []
    with CTX.working():
        moments = [power_moment(j, point, CTX) for j in range(2 * N_GAUSS)]
        for N in range(1, N_GAUSS + 1):
            nodes, wts = gauss_rule(build_recurrence(point, N, CTX), N, CTX)
            for j in range(2 * N):
                q = mpmath.fsum(w * x**j for x, w in zip(nodes, wts))
                _check(9, abs(q - moments[j]) <= TOL_GAUSS * moments[j], f"N={N} j={j}", failures)
    assert not failures, failures


@pytest.mark.parametrize("nu", [-0.5, 0.0, 1.5])
@pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
def test_criterion_4_meixner_limit(nu, lam):
    p = Params(nu, 0.0, lam)
    N = N_MEIXNER + 1
    ref = meixner_table(nu, lam, N, CTX)
    oracle = build_recurrence_stieltjes(truncate_measure(p, N, CTX), N, CTX)
    cheb = build_recurrence_chebyshev(p, N, CTX)
    failures = []
    with CTX.working():
        # the closed forms are validated against the Stieltjes oracle first
        for label, tbl in (("stieltjes", oracle), ("chebyshev", cheb)):
            for n in range(1, N_MEIXNER + 1):
                _check(4, abs(tbl.A[n] ** 2 - ref.A[n] ** 2) <= TOL_MEIXNER * ref.A[n] ** 2,
                       f"{label} A^2[{n}]", failures)
            for n in range(N_MEIXNER + 1):
                _check(4, abs(tbl.B[n] - ref.B[n]) <= TOL_MEIXNER * ref.B[n],
                       f"{label} B[{n}]", failures)
    assert not failures, failures


def test_criterion_10_determinism(tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps([[-0.5, 0.25, 0.2], [1.5, 1.0, 0.5]]))
    ids = "CD_1_16,TODA_3_8,SUM_2_26,NU_3_19_3_32,THM3_2_43,Q_4_14"
    outputs = []
    for run, fmt in ((1, "json"), (2, "json"), (1, "csv"), (2, "csv")):
        out = tmp_path / f"run{run}.{fmt}"
        proc = subprocess.run(
            [sys.executable, "-m", "macpoly.cli", "sweep", "--grid", str(grid), "--id", ids,
             "--format", fmt, "--out", str(out), "--no-timestamp"],
            capture_output=True, text=True, cwd=Path(__file__).parent)
        assert proc.returncode in (0, 1), proc.stderr
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] and outputs[2] == outputs[3] and len(outputs[0]) > 0
    record(10, ok, "sweep reports differ")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
