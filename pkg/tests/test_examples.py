"""Worked examples for each public operation, with closed-form oracles."""
import mpmath
import pytest
from mpmath import mpf

from macpoly.identities import DEGREE_CAP, corollary1_f, nu_shift_gammas
from macpoly.moments import factorial_moment, moment_bruteforce, power_moment, stirling2
from macpoly.opoly import (
    build_recurrence,
    build_recurrence_stieltjes,
    christoffel_darboux_residual,
    eval_poly,
    family_from_table,
    gauss_rule,
    gram_residual,
)
from macpoly.specfun import PrecisionContext, fractional_integral, gamma, laguerre, rho
from macpoly.weight_measure import Params, truncate_measure, weight, weight_residual

CTX = PrecisionContext()
P = Params(0.5, 1, 0.5)
EPS = mpf(10) ** -60


def test_gamma_values():
    with CTX.working():
        assert gamma(1, CTX) == 1 and gamma(5, CTX) == 24
        assert abs(gamma(0.5, CTX) - mpmath.sqrt(mpmath.pi)) < EPS


def test_rho_examples():
    with CTX.working():
        assert rho(2, 0, CTX) == 1
        assert abs(rho(-0.5, 4, CTX) - rho(0.5, 4, CTX) / 2) < EPS


def test_laguerre_low_degrees():
    with CTX.working():
        assert laguerre(0, 1.7, 3) == 1
        assert abs(laguerre(1, 1.7, 3) - (mpf("1.7") + 1 - 3)) < EPS
        alpha, x = mpf("-1.5"), mpf(1)
        explicit = (alpha + 1) * (alpha + 2) / 2 - (alpha + 2) * x + x**2 / 2
        assert abs(laguerre(2, alpha, x) - explicit) < EPS


def test_fractional_integral_index_law():
    # rho_{1/2}(x) = sqrt(pi) exp(-2 sqrt x) keeps the integrand cheap
    with CTX.working():
        t = mpf("0.8")
        rho_half = lambda x: mpmath.sqrt(mpmath.pi) * mpmath.exp(-2 * mpmath.sqrt(x))
        assert abs(fractional_integral(rho_half, 1, t, CTX) - rho(1.5, t, CTX)) < mpf(10) ** -28
        assert abs(fractional_integral(rho_half, 1.5, t, CTX) - rho(2, t, CTX)) < mpf(10) ** -28


def test_rho_asymptotics():
    with CTX.working():
        for mu in (0.5, 2.5):
            vals = [rho(mu, mpf(10) ** e, CTX) * mpf(10) ** (e * (0.25 - mu / 2))
                    * mpmath.exp(2 * mpf(10) ** (e / 2)) for e in (2, 3, 4, 5, 6)]
            assert max(vals) / min(vals) < 1.2
        small = [rho(-1.5, mpf(10) ** -e, CTX) * mpf(10) ** (-1.5 * e) for e in (2, 4, 6)]
        assert max(small) / min(small) < 1.1


def test_weight_examples():
    with CTX.working():
        assert weight(0, P, CTX) == rho(1.5, 1, CTX)
        w = [weight(k, P, CTX) for k in range(3)]
        res = abs(2 * w[2] - mpf("2.5") * mpf("0.5") * w[1] - mpf("0.25") * w[0])
        assert res < mpf(10) ** -70
    assert weight_residual("PEARSON_1_17", 3, P, CTX) <= CTX.tol_algebraic
    assert weight_residual("ODE_1_21", 2, P, CTX) <= CTX.tol_fd
    boundary = weight_residual("DT_1_18", 1, Params(0.5, 0, 0.5), CTX)
    assert boundary < 1e-6     # one-sided difference, informational only


def test_truncation_examples():
    p = Params(0, 1, 0.5)
    m = truncate_measure(p, 0, CTX)
    with CTX.working():
        assert m.tail_bound < CTX.tol_algebraic * m.weights[0]
        assert abs(mpmath.fsum(m.weights) - factorial_moment(0, p, CTX)) < 1e-30
    assert truncate_measure(Params(0, 1, 0.1), 4, CTX).K < truncate_measure(Params(0, 1, 0.8), 4, CTX).K


def test_moment_examples():
    assert stirling2(4, 2) == 7 and all(stirling2(n, n) == 1 for n in range(8))
    with CTX.working():
        nu, lam = mpf("0.5"), mpf("0.5")
        p0 = Params(0.5, 0, 0.5)
        assert abs(power_moment(1, p0, CTX) - lam * mpmath.gamma(nu + 2) / (1 - lam) ** (nu + 2)) < EPS
        expected = rho(1.5, mpf("0.5"), CTX) / (1 - lam) ** (nu + 1)
        assert abs(power_moment(0, P, CTX) - expected) < EPS
        assert factorial_moment(0, P, CTX) == power_moment(0, P, CTX)
        assert abs(power_moment(3, P, CTX) - moment_bruteforce(3, P, "power", CTX)) < 1e-30
        assert abs(factorial_moment(2, P, CTX) - moment_bruteforce(2, P, "factorial", CTX)) < 1e-30
        m = truncate_measure(P, 1, CTX)
        direct = mpmath.fsum(w * k for k, w in enumerate(m.weights))
        assert moment_bruteforce(1, P, "factorial", CTX, measure=m) == direct


def test_low_order_recurrence_entries():
    tbl = build_recurrence(P, 4, CTX)
    with CTX.working():
        mu = [power_moment(j, P, CTX) for j in range(3)]
        assert abs(tbl.B[0] - mu[1] / mu[0]) < EPS
        assert abs(tbl.A[1] ** 2 - (mu[2] / mu[0] - (mu[1] / mu[0]) ** 2)) < EPS
        one = build_recurrence_stieltjes(truncate_measure(P, 1, CTX), 1, CTX)
        assert abs(one.B[0] - mu[1] / mu[0]) < 1e-30
        fam = family_from_table(tbl)
        s = mpmath.sqrt(tbl.mu0)
        assert abs(fam.coeffs[0][0] - 1 / s) < EPS
        assert abs(fam.coeffs[1][1] - 1 / (tbl.A[1] * s)) < EPS
        assert abs(fam.coeffs[1][0] + tbl.B[0] / (tbl.A[1] * s)) < EPS
        for n in range(1, 5):
            assert abs(fam.a[n - 1] / fam.a[n] - tbl.A[n]) < EPS
        assert eval_poly(fam, 0, mpf(7)) == 1 / s
        x = mpf("3.5")
        v = [eval_poly(fam, n, x) for n in range(5)]
        for n in range(1, 4):
            r = x * v[n] - tbl.A[n + 1] * v[n + 1] - tbl.B[n] * v[n] - tbl.A[n] * v[n - 1]
            assert abs(r) < EPS
        assert christoffel_darboux_residual(fam, 0, mpf(1), mpf(4)) < EPS
        m0 = truncate_measure(P, 0, CTX)
        assert gram_residual(fam, m0, 0) < 1e-30


def test_gauss_rule_total_mass():
    nodes, wts = gauss_rule(build_recurrence(P, 4, CTX), 4, CTX)
    with CTX.working():
        assert abs(mpmath.fsum(wts) - power_moment(0, P, CTX)) < 1e-60
        assert abs(mpmath.fsum(w * x for x, w in zip(nodes, wts)) - power_moment(1, P, CTX)) < 1e-60


def test_nu_shift_examples():
    p1 = P.replace(nu=1.5)
    with CTX.working():
        f0, f1 = family_from_table(build_recurrence(P, 6, CTX)), family_from_table(build_recurrence(p1, 6, CTX))
        m1 = truncate_measure(p1, DEGREE_CAP, CTX)
        for n in (1, 3):
            gnn, gnn1 = nu_shift_gammas(f0, f1, m1, n)
            assert abs(gnn1 - f1.table.A[n] / (mpf("0.5") * gnn)) < 1e-60 * gnn1
            x = mpf("2.25")
            resid = eval_poly(f0, n, x + 1) - gnn * eval_poly(f1, n, x) - gnn1 * eval_poly(f1, n - 1, x)
            assert abs(resid) < 1e-60
        assert corollary1_f(f0.coeffs[0], P, mpf(3), 0) == f0.coeffs[0][0]
