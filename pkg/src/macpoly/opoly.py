"""Orthonormal polynomials for the lattice weight.

Two independent constructions of the three-term recurrence

    x p_n(x) = A_{n+1} p_{n+1}(x) + B_n p_n(x) + A_n p_{n-1}(x),

one from closed-form factorial moments (modified Chebyshev algorithm in the
falling-factorial basis), one from the truncated lattice itself (discretized
Stieltjes procedure).  Everything downstream works with orthonormal
polynomials whose leading coefficients are positive.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mpf

from .moments import factorial_moments
from .specfun import DomainError, PrecisionContext, gamma, to_mpf
from .weight_measure import Params, TruncatedMeasure

__all__ = [
    "BreakdownError",
    "RecurrenceTable",
    "PolynomialFamily",
    "build_recurrence_chebyshev",
    "build_recurrence_stieltjes",
    "build_recurrence",
    "family_from_table",
    "eval_poly",
    "eval_all",
    "eval_coeffs",
    "lattice_values",
    "gram_residual",
    "christoffel_darboux_residual",
    "gauss_rule",
    "meixner_table",
]


class BreakdownError(ArithmeticError):
    """A recurrence coefficient beta_n came out non-positive (precision exhausted)."""


@dataclass(frozen=True)
class RecurrenceTable:
    """Orthonormal recurrence coefficients up to degree N.

    ``A`` has length N + 1 with ``A[0] = 0`` (the coefficient of p_{-1} = 0);
    ``B`` holds B_0..B_{N-1}; ``mu0`` is the total mass.
    """

    N: int
    A: tuple
    B: tuple
    mu0: mpf
    method: str


@dataclass(frozen=True)
class PolynomialFamily:
    table: RecurrenceTable
    coeffs: tuple
    a: tuple
    b: tuple
    c: tuple

    @property
    def N(self) -> int:
        return self.table.N


def _to_table(alpha, beta, N, method) -> RecurrenceTable:
    for k in range(1, N + 1):
        if not beta[k] > 0:
            raise BreakdownError(f"beta_{k} = {mpmath.nstr(beta[k], 5)} is not positive")
    A = (mpf(0),) + tuple(mpmath.sqrt(beta[k]) for k in range(1, N + 1))
    return RecurrenceTable(N, A, tuple(alpha[:N]), beta[0], method)


def _modified_chebyshev(mom, a, b, n):
    """Monic recurrence (alpha_0..alpha_{n-1}, beta_0..beta_{n-1}) from the
    2n modified moments mom[l] = int pi_l, where pi_{l+1} = (x - a_l) pi_l - b_l pi_{l-1}."""
    alpha = [a[0] + mom[1] / mom[0]]
    beta = [mom[0]]
    sig_prev = [mpf(0)] * (2 * n)
    sig = list(mom[: 2 * n])
    for k in range(1, n):
        new = [mpf(0)] * (2 * n)
        for l in range(k, 2 * n - k):
            new[l] = (sig[l + 1] - (alpha[k - 1] - a[l]) * sig[l]
                      - beta[k - 1] * sig_prev[l] + b[l] * sig[l - 1])
        if not new[k] > 0:
            raise BreakdownError(f"modified Chebyshev breakdown at k={k}")
        alpha.append(a[k] + new[k + 1] / new[k] - sig[k] / sig[k - 1])
        beta.append(new[k] / sig[k - 1])
        sig_prev, sig = sig, new
    return alpha, beta


def build_recurrence_chebyshev(p: Params, N: int, ctx: PrecisionContext) -> RecurrenceTable:
    """Recurrence table from the closed-form factorial moments.

    The falling factorials f_j(x) = x(x-1)...(x-j+1) satisfy x f_j = f_{j+1} + j f_j,
    and their integrals against the weight are exactly the factorial moments.
    """
    if not 1 <= N <= 64:
        raise DomainError("N must lie in 1..64")
    n = N + 1
    with ctx.working():
        mom = factorial_moments(p, 2 * n, ctx)
        a = [mpf(l) for l in range(2 * n)]
        b = [mpf(0)] * (2 * n)
        alpha, beta = _modified_chebyshev(mom, a, b, n)
        return _to_table(alpha, beta, N, "chebyshev")


def build_recurrence_stieltjes(m: TruncatedMeasure, N: int, ctx: PrecisionContext) -> RecurrenceTable:
    """Recurrence table by the discretized Stieltjes procedure on the lattice 0..K."""
    if N > m.poly_degree_cap:
        raise DomainError(f"N={N} exceeds the measure's degree cap {m.poly_degree_cap}")
    if N + 1 > m.K + 1:
        raise DomainError("not enough lattice points for the requested degree")
    with ctx.working():
        xs = [mpf(k) for k in range(m.K + 1)]
        w = m.weights
        prev = [mpf(0)] * len(xs)
        cur = [mpf(1)] * len(xs)
        norm_prev = None
        alpha, beta = [], []
        for k in range(N + 1):
            sq = [c * c * wk for c, wk in zip(cur, w)]
            norm = mpmath.fsum(sq)
            alpha.append(mpmath.fsum(x * s for x, s in zip(xs, sq)) / norm)
            beta.append(norm if norm_prev is None else norm / norm_prev)
            if k < N:
                al, be = alpha[k], beta[k]
                nxt = [(x - al) * c - be * q for x, c, q in zip(xs, cur, prev)]
                prev, cur = cur, nxt
                norm_prev = norm
        return _to_table(alpha, beta, N, "stieltjes")


@lru_cache(maxsize=512)
def build_recurrence(p: Params, N: int, ctx: PrecisionContext) -> RecurrenceTable:
    """Chebyshev construction, retried once at doubled precision on breakdown."""
    try:
        return build_recurrence_chebyshev(p, N, ctx)
    except BreakdownError:
        hi = ctx.escalated()
        table = build_recurrence_chebyshev(p, N, hi)
        with ctx.working():
            return RecurrenceTable(table.N, tuple(+x for x in table.A),
                                   tuple(+x for x in table.B), +table.mu0, table.method)


def family_from_table(tbl: RecurrenceTable) -> PolynomialFamily:
    """Monomial coefficients of p_0..p_N (row n lists the coefficients of x^0..x^n).

    Like the evaluators below, this works at the mpmath precision in force.
    """
    A, B = tbl.A, tbl.B
    rows = [[1 / mpmath.sqrt(tbl.mu0)]]
    for n in range(tbl.N):
        cur = rows[-1] + [mpf(0)]
        prev = (rows[-2] + [mpf(0)] * 2) if n else [mpf(0)] * (n + 2)
        shifted = [mpf(0)] + rows[-1]
        rows.append([(shifted[i] - B[n] * cur[i] - A[n] * prev[i]) / A[n + 1]
                     for i in range(n + 2)])
    rows = tuple(tuple(r) for r in rows)
    a = tuple(r[n] for n, r in enumerate(rows))
    b = tuple(r[n - 1] if n >= 1 else mpf(0) for n, r in enumerate(rows))
    c = tuple(r[n - 2] if n >= 2 else mpf(0) for n, r in enumerate(rows))
    return PolynomialFamily(tbl, rows, a, b, c)


def eval_all(fam: PolynomialFamily, x, upto: int | None = None) -> list:
    """[p_0(x), ..., p_upto(x)] by the forward recurrence."""
    tbl = fam.table
    upto = tbl.N if upto is None else upto
    vals = [1 / mpmath.sqrt(tbl.mu0)]
    prev = mpf(0)
    for n in range(upto):
        nxt = ((x - tbl.B[n]) * vals[-1] - tbl.A[n] * prev) / tbl.A[n + 1]
        prev = vals[-1]
        vals.append(nxt)
    return vals


def eval_poly(fam: PolynomialFamily, n: int, x) -> mpf:
    if n < 0:
        return mpf(0)
    if n > fam.table.N:
        raise DomainError(f"degree {n} exceeds the family's N={fam.table.N}")
    return eval_all(fam, x, n)[n]


def eval_coeffs(fam: PolynomialFamily, n: int, x) -> mpf:
    """Horner evaluation of the monomial row; an independent check on eval_poly."""
    total = mpf(0)
    for coef in reversed(fam.coeffs[n]):
        total = total * x + coef
    return total


def lattice_values(fam: PolynomialFamily, lo: int, hi: int) -> list:
    """values[n][k - lo] = p_n(k) for integers lo <= k <= hi."""
    tbl = fam.table
    xs = [mpf(k) for k in range(lo, hi + 1)]
    cur = [1 / mpmath.sqrt(tbl.mu0)] * len(xs)
    prev = [mpf(0)] * len(xs)
    out = [cur]
    for n in range(tbl.N):
        bn, an, an1 = tbl.B[n], tbl.A[n], tbl.A[n + 1]
        nxt = [((x - bn) * c - an * q) / an1 for x, c, q in zip(xs, cur, prev)]
        prev, cur = cur, nxt
        out.append(cur)
    return out


def gram_residual(fam: PolynomialFamily, m: TruncatedMeasure, N: int) -> mpf:
    """max_{n,m<=N} |sum_k p_n(k) p_m(k) omega_k - delta_{nm}|."""
    if N > fam.table.N:
        raise DomainError("N exceeds the family's degree")
    vals = lattice_values(fam, 0, m.K)
    worst = mpf(0)
    for i in range(N + 1):
        for j in range(i + 1):
            s = mpmath.fsum(u * v * w for u, v, w in zip(vals[i], vals[j], m.weights))
            worst = max(worst, abs(s - (1 if i == j else 0)))
    return worst


def christoffel_darboux_residual(fam: PolynomialFamily, n: int, x, y) -> mpf:
    """|sum_{k<=n} p_k(x) p_k(y) - A_{n+1}(p_{n+1}(x)p_n(y) - p_n(x)p_{n+1}(y))/(x-y)|."""
    if n >= fam.table.N:
        raise DomainError("need n < N")
    if abs(x - y) < mpmath.ldexp(1, -mpmath.mp.prec // 2):
        raise DomainError("x and y too close; the confluent form is not provided")
    px, py = eval_all(fam, x, n + 1), eval_all(fam, y, n + 1)
    kernel = mpmath.fsum(px[k] * py[k] for k in range(n + 1))
    closed = fam.table.A[n + 1] * (px[n + 1] * py[n] - px[n] * py[n + 1]) / (x - y)
    return abs(kernel - closed)


def gauss_rule(tbl: RecurrenceTable, N: int, ctx: PrecisionContext):
    """N-point Gauss rule from the symmetric tridiagonal Jacobi matrix."""
    if not 1 <= N <= tbl.N:
        raise DomainError("need 1 <= N <= table degree")
    with ctx.working():
        J = mpmath.zeros(N, N)
        for i in range(N):
            J[i, i] = tbl.B[i]
            if i + 1 < N:
                J[i, i + 1] = J[i + 1, i] = tbl.A[i + 1]
        E, Q = mpmath.eigsy(J)
        pairs = sorted((E[i], tbl.mu0 * Q[0, i] ** 2) for i in range(N))
        return [x for x, _ in pairs], [w for _, w in pairs]


def meixner_table(nu, lam, N: int, ctx: PrecisionContext) -> RecurrenceTable:
    """Classical (t = 0) values A_n^2 = n(n+nu)lam/(1-lam)^2, B_n = (n(1+lam) + (nu+1)lam)/(1-lam)."""
    with ctx.working():
        nu, lam = to_mpf(nu), to_mpf(lam)
        A = (mpf(0),) + tuple(mpmath.sqrt(n * (n + nu) * lam) / (1 - lam) for n in range(1, N + 1))
        B = tuple((n * (1 + lam) + (nu + 1) * lam) / (1 - lam) for n in range(N))
        mu0 = gamma(nu + 1, ctx) / (1 - lam) ** (nu + 1)
        return RecurrenceTable(N, A, B, mu0, "meixner")
