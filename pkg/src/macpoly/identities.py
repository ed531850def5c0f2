"""Connection coefficients, nu-shift coefficients, the Q-family and the
catalogued identity verifier.

Parameter derivatives of polynomial data are never taken analytically: the
family is rebuilt at perturbed (t, lambda) and differenced with Richardson
extrapolation (see :mod:`macpoly.numdiff`).  All lattice sums run over the
truncated lattice 0..K of a measure whose degree cap covers the polynomial
degrees involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
from mpmath import mpf

from .moments import stirling2
from .numdiff import central
from .opoly import (
    PolynomialFamily,
    RecurrenceTable,
    build_recurrence,
    build_recurrence_stieltjes,
    christoffel_darboux_residual,
    eval_all,
    family_from_table,
    gram_residual,
    lattice_values,
)
from .specfun import (
    DomainError,
    PrecisionContext,
    _bracket,
    laguerre,
    line_trapezoid,
    rho,
    rho_sequence,
    to_mpf,
)
from .weight_measure import (
    Params,
    TruncatedMeasure,
    truncate_measure,
    weight_residual,
    weights,
)

__all__ = [
    "ConnectionTable",
    "QFamilyTable",
    "IdentityReport",
    "CATALOG",
    "REPORT_MODE",
    "connection_c",
    "connection_d",
    "connection_table",
    "nu_shift_gammas",
    "corollary1_f",
    "corollary1_integrals",
    "build_qfamily",
    "verify_identity",
    "identity_ids",
    "applicable",
]

NFAM = 10           # degree of the families the harness builds
DEGREE_CAP = 11     # polynomial degree the truncation tail bound covers
MAX_N = NFAM - 2    # identities reach up to degree n + 2
COROLLARY1_TOL = 1e-20
COROLLARY1_MAX_N = 3
DEFAULT_MAX_N = 6   # default range of n in sweeps

XS_SHIFT = tuple(range(11))
XS_OFF_LATTICE = ("0.5", "1.7", "3.25", "6.5")
XS_POINTS = ("0", "0.5", "1", "2.5", "5", "7.3")
CD_PAIRS = (("0", "1"), ("0.5", "3.25"), ("2", "7.5"), ("4.4", "10"), ("9", "1.25"))


@dataclass(frozen=True)
class ConnectionTable:
    n: int
    c: tuple
    d: tuple
    gamma_nn: mpf
    gamma_nn1: mpf


@dataclass(frozen=True)
class QFamilyTable:
    """Recurrence (q_n, h_n) and leading pairs (alpha_n, beta_n) of the Q-family.

    ``q[0] = 0`` is a placeholder so that ``q[n]`` is q_n.
    """

    N: int
    q: tuple
    h: tuple
    alpha: tuple
    beta: tuple
    table: RecurrenceTable


@dataclass(frozen=True)
class IdentityReport:
    id: str
    params: Params
    n: int
    residual: mpf
    tolerance: float
    passed: bool
    kind: str
    notes: str = ""
    report_mode: bool = False
    residual_half_step: mpf | None = field(default=None, compare=False)


# ---------------------------------------------------------------------------
# public building blocks


def _shifted_sums(fam: PolynomialFamily, m: TruncatedMeasure, n: int, shift: int):
    if n > fam.table.N:
        raise DomainError("n exceeds the family degree")
    if 2 * m.poly_degree_cap < 2 * n + 1:
        raise DomainError("measure degree cap too small for the connection sums")
    vals = lattice_values(fam, 0, m.K + shift)
    w = m.weights
    return tuple(mpmath.fsum(vals[n][k + shift] * vals[j][k] * w[k] for k in range(m.K + 1))
                 for j in range(n + 1))


def connection_c(fam: PolynomialFamily, m: TruncatedMeasure, n: int) -> tuple:
    """c_{n,j} = sum_k p_n(k+1) p_j(k) omega_k for j = 0..n."""
    return _shifted_sums(fam, m, n, 1)


def connection_d(fam: PolynomialFamily, m: TruncatedMeasure, n: int) -> tuple:
    """d_{n,j} = sum_k p_n(k+2) p_j(k) omega_k for j = 0..n."""
    return _shifted_sums(fam, m, n, 2)


def nu_shift_gammas(fam_nu: PolynomialFamily, fam_nu1: PolynomialFamily,
                    m_nu1: TruncatedMeasure, n: int):
    """(gamma_{n,n}, gamma_{n,n-1}): coefficients of p^nu_n(x+1) on p^{nu+1}_n, p^{nu+1}_{n-1}.

    ``m_nu1`` is the measure of the nu+1 family (weights rho_{k+nu+2}(t) lambda^k/k!).
    """
    K = m_nu1.K
    shifted = lattice_values(fam_nu, 1, K + 1)[n]
    base = lattice_values(fam_nu1, 0, K)
    w = m_nu1.weights
    gnn = mpmath.fsum(shifted[k] * base[n][k] * w[k] for k in range(K + 1))
    gnn1 = (mpmath.fsum(shifted[k] * base[n - 1][k] * w[k] for k in range(K + 1))
            if n >= 1 else mpf(0))
    return gnn, gnn1


def connection_table(p: Params, n: int, ctx: PrecisionContext) -> ConnectionTable:
    with ctx.working():
        pt = _center(p, ctx)
        pt1 = _center(p.replace(nu=to_mpf(p.nu) + 1), ctx)
        m1 = truncate_measure(pt1.p, DEGREE_CAP, ctx)
        return ConnectionTable(n, tuple(pt.conn(n, 1)), tuple(pt.conn(n, 2)),
                               *nu_shift_gammas(pt.fam, pt1.fam, m1, n))


def corollary1_f(coeffs, p: Params, x, n: int) -> mpf:
    """The triple sum f_n(x) built from the monomial coefficients a_{n,m} of p_n
    and Laguerre polynomials of order -nu-1 at t/x (current mpmath precision)."""
    nu, t, _ = p.mp()
    x = to_mpf(x)
    alpha = -nu - 1
    z = t / x
    lag = {r: laguerre(r, alpha, z) for r in range(n + 1)}
    total = mpf(0)
    for m in range(n + 1):
        for k in range(m + 1):
            s = stirling2(m + 1, k + 1) * mpmath.factorial(k)
            sign = -1 if (k + m) % 2 else 1
            inner = mpmath.fsum(x**i / mpmath.factorial(i) * lag[k - i] for i in range(k + 1))
            total += sign * coeffs[m] * s * inner
    return total


def corollary1_integrals(p: Params, n: int, ctx: PrecisionContext):
    """[(integral, approximate integral of |integrand|)] for j = 0..n-1 of
    exp(-(1-lambda)x - t/x) f_n(x) x^(nu+j) over (0, inf), by trapezoidal sums in log x."""
    with ctx.working():
        nu, t, lam = p.mp()
        if t <= 0:
            raise DomainError("vanishing integrals of f_n need t > 0")
        coeffs = _center(p, ctx).fam.coeffs[n]
        bits = ctx.bits
        s = 1 - lam
        out = []
        for j in range(n):
            mu = nu + j + 1
            y = (mu + mpmath.sqrt(mu * mu + 4 * s * t)) / 2
            center = mpmath.log(y / s)
            sf, tf, muf, cf = float(s), float(t), float(mu), float(center)

            def env(u, sf=sf, tf=tf, muf=muf):
                try:
                    return -sf * math.exp(u) - tf * math.exp(-u) + muf * u + n * abs(u)
                except OverflowError:
                    return -math.inf
            drop = bits * math.log(2.0) + 40.0 + 10 * n
            left = _bracket(env, cf, -1, drop) - cf
            right = _bracket(env, cf, +1, drop) - cf
            h0 = min(0.5, 1.0 / math.sqrt(float(s * y + t / y)))
            def g(u, mu=mu):
                x = mpmath.exp(u)
                return mpmath.exp(-s * x - t / x + mu * u) * corollary1_f(coeffs, p, x, n)

            # coarse integral of |g| sets the scale against which cancellation is judged
            hm = mpf(h0) / 4
            jl, jr = int(math.floor(left / h0)) * 4, int(math.ceil(right / h0)) * 4
            absval = hm * mpmath.fsum(abs(g(center + i * hm)) for i in range(jl, jr + 1))
            value = line_trapezoid(g, center, left, right, h0, bits, scale=absval)
            out.append((value, absval))
        return out


def build_qfamily(p: Params, N: int, ctx: PrecisionContext, method: str = "chebyshev") -> QFamilyTable:
    """Q-family for the weight rho_{k+nu+1}(lambda t) lambda^k / k!.

    That weight is the lattice weight at (nu, lambda t, lambda), so the same
    constructions apply with t replaced by lambda t.
    """
    with ctx.working():
        nu, t, lam = p.mp()
        shifted = Params(p.nu, lam * t, p.lam)
        if method == "chebyshev":
            table = build_recurrence(shifted, N, ctx)
        elif method == "stieltjes":
            table = build_recurrence_stieltjes(truncate_measure(shifted, N + 1, ctx), N, ctx)
        else:
            raise ValueError(f"unknown method {method!r}")
        fam = family_from_table(table)
        return QFamilyTable(N, table.A, table.B, fam.a, fam.b, table)


# ---------------------------------------------------------------------------
# evaluation state at one parameter point


class _Point:
    """Family of degree NFAM at fixed parameters, with lazily built lattice data on -2..K+2."""

    def __init__(self, p: Params, ctx: PrecisionContext, K: int):
        self.p, self.ctx, self.K = p, ctx, K
        with ctx.working():
            self.nu, self.t, self.lam = p.mp()
            self.table = build_recurrence(p, NFAM, ctx)
            self.fam = family_from_table(self.table)
        self._lattice = None
        self._weights = None

    @property
    def weights(self):
        if self._weights is None:
            self._weights = weights(self.p, self.K, self.ctx)
        return self._weights

    @property
    def lattice(self):
        if self._lattice is None:
            with self.ctx.working():
                self._lattice = lattice_values(self.fam, -2, self.K + 2)
        return self._lattice

    def P(self, n, k):
        return mpf(0) if n < 0 else self.lattice[n][k + 2]

    def at(self, x):
        return eval_all(self.fam, to_mpf(x))

    def A(self, n):
        return self.table.A[n] if n >= 1 else mpf(0)

    def B(self, n):
        return self.table.B[n]

    def a(self, n):
        return self.fam.a[n] if n >= 0 else mpf(0)

    def b(self, n):
        return self.fam.b[n] if n >= 0 else mpf(0)

    def c(self, n):
        return self.fam.c[n] if n >= 0 else mpf(0)

    def lsum(self, f):
        return mpmath.fsum(f(k) for k in range(self.K + 1))

    def conn(self, n, shift):
        w = self.weights
        return [self.lsum(lambda k: self.P(n, k + shift) * self.P(j, k) * w[k]) for j in range(n + 1)]


@lru_cache(maxsize=128)
def _point(p: Params, ctx: PrecisionContext, K: int) -> _Point:
    return _Point(p, ctx, K)


def _center(p: Params, ctx: PrecisionContext) -> _Point:
    return _point(p, ctx, truncate_measure(p, DEGREE_CAP, ctx).K)


class _Derivs:
    """Derivatives of the coefficient data (a_{n,i}, A_n, B_n) in one parameter."""

    def __init__(self, flat, N):
        it = iter(flat)
        self.coeffs = [[next(it) for _ in range(n + 1)] for n in range(N + 1)]
        self.A = [next(it) for _ in range(N + 1)]
        self.B = [next(it) for _ in range(N)]
        self.a = [row[n] for n, row in enumerate(self.coeffs)]
        self.b = [row[n - 1] if n else mpf(0) for n, row in enumerate(self.coeffs)]
        self.c = [row[n - 2] if n > 1 else mpf(0) for n, row in enumerate(self.coeffs)]

    def poly(self, n, x):
        if n < 0:
            return mpf(0)
        total = mpf(0)
        for coef in reversed(self.coeffs[n]):
            total = total * x + coef
        return total


def _flat(pt: _Point):
    out = [v for row in pt.fam.coeffs for v in row]
    out.extend(pt.table.A)
    out.extend(pt.table.B)
    return out


@lru_cache(maxsize=128)
def _coef_derivs(p: Params, var: str, ctx: PrecisionContext, h: mpf, K: int) -> _Derivs:
    with ctx.working():
        x0 = to_mpf(getattr(p, var))
        flat = central(lambda x: _flat(_point(p.replace(**{var: x}), ctx, K)), x0, h)
        return _Derivs(flat, NFAM)


@lru_cache(maxsize=128)
def _q_derivs(p: Params, ctx: PrecisionContext, h: mpf) -> _Derivs:
    """t d/dt - lambda d/dlambda of Q-family coefficient data at (nu, t, lambda)."""
    with ctx.working():
        nu, t, lam = p.mp()

        def q_flat(tt, ll):
            return _flat(_center(Params(p.nu, ll * tt, ll), ctx))

        dt = central(lambda x: q_flat(x, lam), t, h)
        dl = central(lambda x: q_flat(t, x), lam, h)
        return _Derivs([t * u - lam * v for u, v in zip(dt, dl)], NFAM)


@lru_cache(maxsize=64)
def _dP_dt_lattice(p: Params, ctx: PrecisionContext, h: mpf, K: int):
    """rows[n][k + 2] = d p_n / dt at lattice point k, for k = -2..K+2."""
    d = _coef_derivs(p, "t", ctx, h, K)
    with ctx.working():
        xs = [mpf(k) for k in range(-2, K + 3)]
        return [[d.poly(n, x) for x in xs] for n in range(NFAM + 1)]


@lru_cache(maxsize=64)
def _dw_dt(p: Params, ctx: PrecisionContext, h: mpf, K: int):
    with ctx.working():
        t = to_mpf(p.t)
        return central(lambda x: weights(p.replace(t=x), K, ctx), t, h)


# ---------------------------------------------------------------------------
# residual helpers


def _res(terms) -> mpf:
    if not isinstance(terms, (list, tuple)):
        return abs(terms)     # already a residual
    terms = [mpf(x) for x in terms]
    scale = max(abs(x) for x in terms) if terms else mpf(0)
    total = abs(mpmath.fsum(terms))
    return total / scale if scale else total


def _worst(groups) -> mpf:
    return max((_res(g) for g in groups), default=mpf(0))


def _fmt(x) -> str:
    return mpmath.nstr(x, 6)


class _Env:
    """Everything one identity evaluation needs, built lazily."""

    def __init__(self, p: Params, n: int, ctx: PrecisionContext, h: mpf):
        self.p, self.n, self.ctx, self.h = p, n, ctx, h
        self.pt = _center(p, ctx)
        self.K = self.pt.K
        self.nu, self.t, self.lam = self.pt.nu, self.pt.t, self.pt.lam

    def dt(self) -> _Derivs:
        return _coef_derivs(self.p, "t", self.ctx, self.h, self.K)

    def dl(self) -> _Derivs:
        return _coef_derivs(self.p, "lam", self.ctx, self.h, self.K)

    def dP(self, n, k):
        return mpf(0) if n < 0 else _dP_dt_lattice(self.p, self.ctx, self.h, self.K)[n][k + 2]

    def dw(self):
        return _dw_dt(self.p, self.ctx, self.h, self.K)

    def nu1(self) -> _Point:
        return _center(self.p.replace(nu=self.nu + 1), self.ctx)

    def q(self) -> _Point:
        return _center(Params(self.p.nu, self.lam * self.t, self.p.lam), self.ctx)


# ---------------------------------------------------------------------------
# the catalog: each checker returns (groups of terms summing to zero, notes)


def _weight_check(wid):
    def check(e: _Env):
        return [weight_residual(wid, e.n, e.p, e.ctx, step=e.h)], ""
    return check


def _rho_recurrence(e: _Env):
    mu = e.n + e.nu + 1
    ctx = e.ctx
    return [[rho(mu + 1, e.t, ctx), -mu * rho(mu, e.t, ctx), -e.t * rho(mu - 1, e.t, ctx)]], \
        f"mu={_fmt(mu)}"


def _gram(e: _Env):
    m = truncate_measure(e.p, DEGREE_CAP, e.ctx)
    return [gram_residual(e.pt.fam, m, e.n)], f"K={m.K}"


def _cd(e: _Env):
    groups = []
    for xs, ys in CD_PAIRS:
        x, y = mpf(xs), mpf(ys)
        px, py = e.pt.at(x), e.pt.at(y)
        kernel = mpmath.fsum(px[k] * py[k] for k in range(e.n + 1))
        closed = e.pt.A(e.n + 1) * (px[e.n + 1] * py[e.n] - px[e.n] * py[e.n + 1]) / (x - y)
        groups.append([kernel, -closed])
        christoffel_darboux_residual(e.pt.fam, e.n, x, y)
    return groups, ""


def _expansion(shift):
    def check(e: _Env):
        coef = e.pt.conn(e.n, shift)
        groups = []
        for x in XS_SHIFT:
            vals = e.pt.at(x)
            shifted = e.pt.at(x + shift)[e.n]
            groups.append([shifted] + [-coef[j] * vals[j] for j in range(e.n + 1)])
        return groups, f"c_n,n={_fmt(coef[e.n])}"
    return check


def _cnn1(e: _Env):
    c = e.pt.conn(e.n, 1)
    return [[c[e.n - 1], -e.n / e.pt.A(e.n)]], ""


def _dnn1(e: _Env):
    d = e.pt.conn(e.n, 2)
    return [[d[e.n - 1], -2 * e.n / e.pt.A(e.n)]], ""


def _c_derivative_form(e: _Env):
    pt, n, w = e.pt, e.n, e.pt.weights
    c = pt.conn(n, 1)
    groups = []
    for j in range(n - 1):
        s = pt.lsum(lambda k: e.dP(n, k) * k * pt.P(j, k - 1) * w[k])
        groups.append([c[j], -s / e.lam])
    return groups, ""


def _x_sum(e: _Env):
    pt, n, w = e.pt, e.n, e.pt.weights
    return pt.lsum(lambda k: e.dP(n, k) * k * pt.P(n - 1, k - 1) * w[k])


def _sum_2_26(e: _Env):
    pt, n = e.pt, e.n
    X = _x_sum(e)
    return [[X, -e.lam * n / pt.A(n), pt.A(n) * e.dt().a[n] / pt.a(n)]], ""


def _sum_2_29(e: _Env):
    pt, n = e.pt, e.n
    dw = e.dw()
    s = pt.lsum(lambda k: pt.P(n, k) ** 2 * dw[k])
    return [[s, 2 * e.dt().a[n] / pt.a(n)]], ""


def _shift_sq(e: _Env):
    pt, n, w = e.pt, e.n, e.pt.weights
    return pt.lsum(lambda k: pt.P(n, k + 1) ** 2 * w[k])


def _ratio_deriv(e: _Env, d: _Derivs, n):
    # d(b_n / a_n)
    pt = e.pt
    return d.b[n] / pt.a(n) - pt.b(n) * d.a[n] / pt.a(n) ** 2


def _sum_2_30(e: _Env):
    pt, n, d = e.pt, e.n, e.dt()
    lhs = _shift_sq(e)
    core = _ratio_deriv(e, d, n) + _ratio_deriv(e, d, n + 1)
    tail = 2 * pt.B(n) * d.a[n] / pt.a(n)
    printed = [lhs, -core / e.lam, tail / e.lam]
    other = [lhs, -core / e.lam, -tail / e.lam]
    return [printed], f"with +2B_n term: residual={_fmt(_res(other))}"


def _sum_2_31(e: _Env):
    pt, n = e.pt, e.n
    c = pt.conn(n, 1)
    return [[_shift_sq(e), -1, -(n / pt.A(n)) ** 2] + [-c[j] ** 2 for j in range(n - 1)]], ""


def _sum_2_32(e: _Env):
    pt, n, d, w = e.pt, e.n, e.dt(), e.pt.weights
    cs = [pt.lsum(lambda k: e.dP(n, k) * k * pt.P(j, k - 1) * w[k]) / e.lam for j in range(n - 1)]
    core = _ratio_deriv(e, d, n) + _ratio_deriv(e, d, n + 1)
    tail = 2 * pt.B(n) * d.a[n] / pt.a(n)
    lhs = [c * c for c in cs]
    printed = lhs + [-core / e.lam, tail / e.lam, 1, (n / pt.A(n)) ** 2]
    other = lhs + [-core / e.lam, -tail / e.lam, 1, (n / pt.A(n)) ** 2]
    return [printed], f"with +2B_n term: residual={_fmt(_res(other))}"


def _cubic_sum(e: _Env, j):
    # sum_k dP_n/dt(k) k(k-1)(k+nu) p_j(k-2) omega_k
    pt, n, w, nu = e.pt, e.n, e.pt.weights, e.nu
    return pt.lsum(lambda k: e.dP(n, k) * k * (k - 1) * (k + nu) * pt.P(j, k - 2) * w[k])


def _d_2_36(e: _Env):
    pt, n = e.pt, e.n
    d = pt.conn(n, 2)
    scale = e.t * e.lam**2
    return [[d[j], _cubic_sum(e, j) / scale] for j in range(n - 3)], ""


def _d_2_37(e: _Env):
    pt, n, dt = e.pt, e.n, e.dt()
    d = pt.conn(n, 2)
    scale = e.t * e.lam**2
    return [[d[n - 3], pt.a(n - 3) * dt.a[n] / pt.a(n) ** 2 / scale,
             _cubic_sum(e, n - 3) / scale]], ""


def _d_2_38_terms(e: _Env, coefficient):
    pt, n, dt = e.pt, e.n, e.dt()
    d = pt.conn(n, 2)
    scale = e.t * e.lam**2
    an, an1 = pt.a(n), pt.a(n + 1)
    # d/dt (b_{n+1} / (a_{n+1} a_n))
    dratio = (dt.b[n + 1] / (an1 * an) - pt.b(n + 1) * dt.a[n + 1] / (an1**2 * an)
              - pt.b(n + 1) * dt.a[n] / (an1 * an**2))
    return [d[n - 2], -pt.a(n - 2) / an / scale,
            (coefficient * pt.a(n - 2) + pt.b(n - 2)) * dt.a[n] / an**2 / scale,
            pt.a(n - 2) * dratio / scale, _cubic_sum(e, n - 2) / scale]


def _d_2_38(e: _Env):
    printed = _d_2_38_terms(e, e.nu + 2 * e.n - 5)
    derived = _d_2_38_terms(e, e.nu - 2 * e.n + 3)
    return [printed], f"with (nu-2n+3) in place of (nu+2n-5): residual={_fmt(_res(derived))}"


def _e2(pt: _Point, n):
    # <p_n, x^(n+2)> from the leading coefficient triples
    return (pt.b(n + 2) * pt.b(n + 1) / (pt.a(n + 2) * pt.a(n + 1) * pt.a(n))
            - pt.c(n + 2) / (pt.a(n + 2) * pt.a(n)))


def _sum_2_40(e: _Env):
    pt, n, w = e.pt, e.n, e.pt.weights
    s = pt.lsum(lambda k: pt.P(n, k) * mpf(k) ** (n + 2) * w[k])
    return [[s, -_e2(pt, n)]], ""


def _d_2_41_terms(e: _Env, last_bracket):
    pt, n, dt = e.pt, e.n, e.dt()
    scale = e.t * e.lam**2
    an, an1, an2 = pt.a(n), pt.a(n + 1), pt.a(n + 2)
    bn1, bn2, cn2 = pt.b(n + 1), pt.b(n + 2), pt.c(n + 2)
    de2 = (dt.b[n + 2] * bn1 / (an2 * an1 * an) + bn2 * dt.b[n + 1] / (an2 * an1 * an)
           - bn2 * bn1 * (dt.a[n + 2] / an2 + dt.a[n + 1] / an1 + dt.a[n] / an) / (an2 * an1 * an)
           - dt.c[n + 2] / (an2 * an) + cn2 * (dt.a[n + 2] / an2 + dt.a[n] / an) / (an2 * an))
    dratio = (dt.b[n + 1] / (an1 * an) - bn1 * dt.a[n + 1] / (an1**2 * an)
              - bn1 * dt.a[n] / (an1 * an**2))
    rhs = [pt.A(n) * (pt.B(n) + pt.B(n - 1) + 1 - 2 * n) if n >= 1 else mpf(0),
           pt.a(n - 1) * de2,
           -(pt.b(n - 1) + (e.nu + 1 - 2 * n) * pt.a(n - 1)) * dratio,
           last_bracket * dt.a[n] / an**2,
           -_cubic_sum(e, n - 1)]
    return [-2 * n / pt.A(n)] + [x / scale for x in rhs]


def _d_2_41(e: _Env):
    pt, n, nu = e.pt, e.n, e.nu
    a1, b1, c1 = pt.a(n - 1), pt.b(n - 1), pt.c(n - 1)
    printed = (nu + 2 * (n - 1)) * a1 - (nu - 1 + 2 * (n - 2) ** 2) * b1 - c1
    p0, p1 = a1, b1 - 2 * (n - 1) * a1
    p2 = c1 - 2 * (n - 2) * b1 + 2 * (n - 1) * (n - 2) * a1
    derived = -(p2 + (nu - 1) * p1 - nu * p0)
    res_derived = _res(_d_2_41_terms(e, derived))
    return [_d_2_41_terms(e, printed)], f"derived bracket: residual={_fmt(res_derived)}"


def _thm3_terms(e: _Env, x, reading, coefficient):
    pt, n, dt, w, nu = e.pt, e.n, e.dt(), e.pt.weights, e.nu
    scale = e.t * e.lam**2
    px = pt.at(x)

    def P(j):
        return px[j] if j >= 0 else mpf(0)

    an, an1 = pt.a(n), pt.a(n + 1)
    dratio = (dt.b[n + 1] / (an1 * an) - pt.b(n + 1) * dt.a[n + 1] / (an1**2 * an)
              - pt.b(n + 1) * dt.a[n] / (an1 * an**2))
    bracket2 = (pt.a(n - 2) / an - (coefficient * pt.a(n - 2) + pt.b(n - 2)) * dt.a[n] / an**2
                - pt.a(n - 2) * dratio)

    def kernel(k):
        first = pt.P(n - 1, k) if reading == "printed" else P(n - 1)
        return (e.dP(n, k) * k * (k - 1) * (k + nu) * w[k] / (x - k + 2)
                * (first * pt.P(n - 2, k - 2) - P(n - 2) * pt.P(n - 1, k - 2)))

    s = pt.lsum(kernel)
    return [pt.at(x + 2)[n], -P(n), -2 * n / pt.A(n) * P(n - 1),
            pt.a(n - 3) * dt.a[n] / an**2 / scale * P(n - 3),
            -bracket2 / scale * P(n - 2),
            pt.A(n - 1) / scale * s]


def _thm3(reading):
    def check(e: _Env):
        groups = [_thm3_terms(e, mpf(x), reading, e.nu + 2 * e.n - 5) for x in XS_OFF_LATTICE]
        alt = _worst([_thm3_terms(e, mpf(x), reading, e.nu - 2 * e.n + 3) for x in XS_OFF_LATTICE])
        return groups, f"with (nu-2n+3) bracket: residual={_fmt(alt)}"
    return check


def _shift_2_25(e: _Env):
    pt, n, dt, w = e.pt, e.n, e.dt(), e.pt.weights
    groups = []
    for xs in XS_OFF_LATTICE:
        x = mpf(xs)
        px = pt.at(x)

        def P(j):
            return px[j] if j >= 0 else mpf(0)

        s = pt.lsum(lambda k: e.dP(n, k) * k * w[k] / (x - k + 1) * (
            P(n - 1) * (pt.A(n - 1) * pt.P(n - 2, k - 1) + (x - k + 1) * pt.P(n - 1, k - 1))
            - pt.A(n - 1) * P(n - 2) * pt.P(n - 1, k - 1)))
        groups.append([pt.at(x + 1)[n], -P(n), -pt.A(n) / (e.lam * pt.a(n)) * dt.a[n] * P(n - 1),
                       -s / e.lam])
    return groups, ""


def _shift_2_28(e: _Env):
    pt, n, w = e.pt, e.n, e.pt.weights
    groups = []
    for xs in XS_OFF_LATTICE:
        x = mpf(xs)
        px = pt.at(x)

        def P(j):
            return px[j] if j >= 0 else mpf(0)

        s = pt.lsum(lambda k: e.dP(n, k) * k * w[k] / (x - k + 1) * (
            P(n - 1) * pt.P(n - 2, k - 1) - P(n - 2) * pt.P(n - 1, k - 1)))
        groups.append([pt.at(x + 1)[n], -P(n), -n / pt.A(n) * P(n - 1),
                       -pt.A(n - 1) / e.lam * s])
    return groups, ""


def _corollary1(e: _Env):
    groups = []
    for value, absval in corollary1_integrals(e.p, e.n, e.ctx):
        groups.append(abs(value) / absval)
    return groups, ""


# section 3: lambda-derivatives


def _l_3_2_3_5(e: _Env):
    pt, n, d = e.pt, e.n, e.dl()
    groups = []
    for xs in XS_POINTS:
        x = mpf(xs)
        px = pt.at(x)
        pn1 = px[n - 1] if n >= 1 else mpf(0)
        dpn = d.poly(n, x)
        cn = e.lam * d.a[n] / pt.a(n)
        groups.append([e.lam * dpn, pt.A(n) * pn1, -cn * px[n]])                        # (3.2)
        groups.append([e.lam * pt.a(n) * dpn, pt.a(n - 1) * pn1, -e.lam * d.a[n] * px[n]])  # (3.3)
        groups.append([e.lam * dpn, pt.A(n) * pn1, pt.B(n) / 2 * px[n]])                 # (3.5)
    return groups, ""


def _l_3_4(e: _Env):
    return [[e.pt.B(e.n), 2 * e.lam * e.dl().a[e.n] / e.pt.a(e.n)]], ""


def _l_3_6(e: _Env):
    pt, n, d = e.pt, e.n, e.dl()
    return [[pt.A(n + 1) ** 2, pt.A(n) ** 2, e.lam * _ratio_deriv(e, d, n),
             e.lam * _ratio_deriv(e, d, n + 1)]], ""


def _l_3_7(e: _Env):
    return [[e.pt.A(e.n) ** 2, e.lam * _ratio_deriv(e, e.dl(), e.n)]], ""


def _toda_3_8(e: _Env):
    pt, n = e.pt, e.n
    return [[e.lam * e.dl().B[n], -pt.A(n + 1) ** 2, pt.A(n) ** 2]], ""


def _toda_3_9(e: _Env):
    pt, n, d = e.pt, e.n, e.dl()
    lhs = e.lam * 2 * pt.A(n) * d.A[n]
    return [[lhs, -pt.A(n) ** 2 * pt.B(n), pt.A(n) ** 2 * pt.B(n - 1)]], ""


def _l_3_10(e: _Env):
    pt, n = e.pt, e.n
    return [[pt.a(n) * pt.b(n) * pt.B(n), 2 * pt.a(n - 1) ** 2]], ""


def _l_3_11(e: _Env):
    pt, n = e.pt, e.n
    return [[pt.B(n - 1) * pt.B(n) * pt.B(n + 1),
             -pt.A(n + 1) ** 2 * pt.B(n), pt.A(n + 1) ** 2 * pt.B(n + 1)]], ""


def _l_3_12(e: _Env):
    pt, n = e.pt, e.n
    return [[pt.b(n) / pt.a(n) * pt.B(n), 2 * pt.A(n) ** 2]], ""


# section 3: nu-shift


class _NuState:
    def __init__(self, p: Params, ctx: PrecisionContext):
        self.p0 = _center(p, ctx)
        self.p1 = _center(p.replace(nu=self.p0.nu + 1), ctx)
        self.m1 = truncate_measure(self.p1.p, DEGREE_CAP, ctx)
        self._g = {}

    def gammas(self, n):
        if n not in self._g:
            self._g[n] = nu_shift_gammas(self.p0.fam, self.p1.fam, self.m1, n)
        return self._g[n]

    def gnn(self, n):
        return self.gammas(n)[0]

    def gnn1(self, n):
        return self.gammas(n)[1]

    def bracket(self, n):
        # n + b_n^nu / a_n^nu - b_n^{nu+1} / a_n^{nu+1}
        p0, p1 = self.p0, self.p1
        return n + p0.b(n) / p0.a(n) - p1.b(n) / p1.a(n)


@lru_cache(maxsize=64)
def _nu_state(p: Params, ctx: PrecisionContext) -> _NuState:
    return _NuState(p, ctx)


def _Nu(e: _Env) -> _NuState:
    return _nu_state(e.p, e.ctx)


def _nu_3_14(e: _Env):
    nu = _Nu(e)
    p0, w1, n = nu.p0, nu.m1.weights, e.n
    vals = lattice_values(p0.fam, 1, nu.m1.K + 1)[n]
    groups = []
    for j in range(n - 1):
        groups.append([vals[k] * w1[k] * mpmath.ff(k, j) for k in range(j, nu.m1.K + 1)])
    return groups, ""


def _nu_3_15(e: _Env):
    nu, n = _Nu(e), e.n
    groups = []
    for x in XS_SHIFT:
        v1 = nu.p1.at(x)
        groups.append([nu.p0.at(x + 1)[n], -nu.gnn(n) * v1[n],
                       -nu.gnn1(n) * (v1[n - 1] if n else 0)])
    return groups, ""


def _nu_3_19(e: _Env):
    nu, n = _Nu(e), e.n
    return [[nu.gnn1(n), -nu.p0.a(n) / nu.p1.a(n - 1) * nu.bracket(n)]], ""


def _nu_3_20(e: _Env):
    nu, n = _Nu(e), e.n
    return [[nu.gnn(n), -nu.p0.a(n) / nu.p1.a(n)]], ""


def _nu_3_21(e: _Env):
    nu, n = _Nu(e), e.n
    return [[nu.gnn1(n), -nu.gnn(n) / nu.p1.A(n) * nu.bracket(n)]], ""


def _nu_3_22(e: _Env):
    nu, n, lam = _Nu(e), e.n, e.lam
    g = nu.gnn1(n)
    return [[g, -nu.p1.a(n - 1) / nu.p0.a(n) / lam],
            [g, -nu.p0.A(n) / nu.gnn(n - 1) / lam],
            [g, -nu.p1.A(n) / nu.gnn(n) / lam]], ""


def _nu_3_23(e: _Env):
    nu, n, lam = _Nu(e), e.n, e.lam
    lhs = (nu.p1.a(n - 1) / nu.p0.a(n)) ** 2
    return [[lhs, -(nu.p1.A(n) / nu.gnn(n)) ** 2], [lhs, -lam * nu.bracket(n)]], ""


def _nu_3_24(e: _Env):
    nu, n, lam = _Nu(e), e.n, e.lam
    p0, p1 = nu.p0, nu.p1
    br = p1.b(n) / p1.a(n) - p0.b(n + 1) / p0.a(n + 1) - n
    return [[nu.gnn(n) ** 2, -br / lam], [(p0.a(n) / p1.a(n)) ** 2, -br / lam]], ""


def _nu_3_25(e: _Env):
    nu, n, lam = _Nu(e), e.n, e.lam
    g = nu.gnn(n)
    return [[lam * g**2, (nu.p1.A(n) / g) ** 2 / lam, -nu.p0.B(n)]], ""


def _nu_3_26(e: _Env):
    nu, n, lam = _Nu(e), e.n, e.lam
    return [[lam * nu.gnn(n) ** 2, (nu.p1.A(n + 1) / nu.gnn(n + 1)) ** 2 / lam,
             -1, -nu.p1.B(n)]], ""


def _nu_3_27(e: _Env):
    nu, n, lam = _Nu(e), e.n, e.lam
    g = nu.gnn(n)
    return [[lam * g**2, (nu.p0.A(n + 1) / g) ** 2 / lam, -1, -nu.p1.B(n)]], ""


def _nu_3_28(e: _Env):
    nu, n = _Nu(e), e.n
    return [[nu.gnn1(n) ** 2, nu.gnn(n) ** 2, -nu.p0.B(n) / e.lam]], ""


def _nu_3_29(e: _Env):
    nu, n = _Nu(e), e.n
    return [[nu.gnn1(n + 1) ** 2, nu.gnn(n) ** 2, -(1 + nu.p1.B(n)) / e.lam]], ""


def _xy(nu: _Nu, n):
    X, Y = nu.p1.A(n) ** 2, nu.p0.A(n + 1) ** 2
    return X, Y, nu.p0.B(n), nu.p1.B(n)


def _nu_3_30(e: _Env):
    nu, n = _Nu(e), e.n
    X, Y, B0, B1 = _xy(nu, n)
    g2 = nu.gnn(n) ** 2
    # cleared of the denominator
    return [[e.lam * g2 * (B0 - B1 - 1), -(X - Y)]], ""


def _nu_3_31(e: _Env):
    nu, n = _Nu(e), e.n
    X, Y, B0, B1 = _xy(nu, n)
    g2 = nu.gnn(n) ** 2
    return [[e.lam * g2 * (Y - X), -Y * B0, X * (B1 + 1)]], ""


def _nu_3_32(e: _Env):
    nu, n = _Nu(e), e.n
    X, Y, B0, B1 = _xy(nu, n)
    return [[(X - Y) ** 2, (Y * B0 - X * (B1 + 1)) * (B0 - B1 - 1)]], ""


_NU_PARTS = {}


def _nu_all(e: _Env):
    groups, worst = [], []
    for key, fn in _NU_PARTS.items():
        if key == "NU_3_19_3_32":
            continue
        g, _ = fn(e)
        worst.append(f"{key}={_fmt(_worst(g))}")
        groups.extend(g)
    return groups, "; ".join(worst)


@lru_cache(maxsize=256)
def _nabla(p: Params, ctx: PrecisionContext, n: int):
    # nabla[p_n(k) omega_k] for k = 0..K+1, with omega_{-1} = omega_{K+1} = 0
    pt = _center(p, ctx)
    w = pt.weights
    with ctx.working():
        return [(pt.P(n, k) * w[k] if k <= pt.K else mpf(0))
                - (pt.P(n, k - 1) * w[k - 1] if k >= 1 else mpf(0)) for k in range(pt.K + 2)]


def _bwd_terms(e: _Env, j):
    # nabla[p_n(k) omega_k] (-k)_j
    out = []
    for k, d in enumerate(_nabla(e.p, e.ctx, e.n)):
        out.append(d * mpmath.rf(-k, j))
    return out


def _bwd_3_35(e: _Env):
    return [_bwd_terms(e, j) for j in range(e.n + 1)], ""


@lru_cache(maxsize=64)
def _rho_shifted(p: Params, ctx: PrecisionContext, K: int):
    # rho_{k+nu-1}(t) for k = 0..K+1
    with ctx.working():
        nu, t, _ = p.mp()
        return rho_sequence(nu - 1, K + 2, t, ctx)


def _bwd_3_36(e: _Env):
    pt, n, lam, t, nu = e.pt, e.n, e.lam, e.t, e.nu
    if t <= 0:
        raise DomainError("the expanded backward-difference form needs t > 0")
    r = _rho_shifted(e.p, e.ctx, e.K)      # r[k] = rho_{k+nu-1}, r[k+1] = rho_{k+nu}
    groups, mismatch = [], mpf(0)
    for j in range(n + 1):
        terms = []
        for k in range(j, e.K + 1):
            body = ((lam * (k + nu) * pt.P(n, k) - k * pt.P(n, k - 1)) * r[k + 1]
                    + lam * t * pt.P(n, k) * r[k])
            terms.append(body * lam**k / mpmath.factorial(k - j))
        groups.append(terms)
        # termwise agreement with the backward-difference summands
        bwd = _bwd_terms(e, j)
        sign = -1 if j % 2 else 1
        for k, term in zip(range(j, e.K + 1), terms):
            ref = bwd[k]
            mismatch = max(mismatch, abs(sign * term / lam - ref) / max(abs(ref), abs(term / lam)))
    return groups, f"termwise mismatch vs backward-difference form={_fmt(mismatch)}"


# section 4: the Q-family


def _q_4_10(e: _Env):
    q, n, d = e.q(), e.n, _q_derivs(e.p, e.ctx, e.h)
    return [[d.a[n] / q.a(n), -q.B(n) / 2]], ""


def _q_4_11(e: _Env):
    q, n, d = e.q(), e.n, _q_derivs(e.p, e.ctx, e.h)
    groups = []
    for xs in XS_POINTS:
        x = mpf(xs)
        qx = q.at(x)
        groups.append([d.poly(n, x), -q.A(n) * (qx[n - 1] if n else 0), -q.B(n) / 2 * qx[n]])
    return groups, ""


def _q_4_12(e: _Env):
    q, n, d = e.q(), e.n, _q_derivs(e.p, e.ctx, e.h)
    return [[d.B[n], q.A(n + 1) ** 2, -q.A(n) ** 2]], ""


def _q_4_13(e: _Env):
    q, n, d = e.q(), e.n, _q_derivs(e.p, e.ctx, e.h)
    return [[2 * q.A(n) * d.A[n], -q.A(n) ** 2 * (q.B(n - 1) - q.B(n))]], ""


def _q_4_14(e: _Env):
    q, n = e.q(), e.n
    return [[2 * q.A(n) ** 2, q.B(n) * q.b(n) / q.a(n)]], ""


@dataclass(frozen=True)
class _Entry:
    check: object
    kind: str
    min_n: int
    needs_t: bool = False
    report_mode: bool = False
    tolerance: float | None = None
    title: str = ""


_A, _F = "algebraic", "finite-difference"

CATALOG = {
    "RHO_1_10": _Entry(_rho_recurrence, _A, 0, True, title="rho recurrence at order n+nu+1"),
    "PEARSON_1_17": _Entry(_weight_check("PEARSON_1_17"), _A, 2, title="Pearson-type equation"),
    "DT_1_18": _Entry(_weight_check("DT_1_18"), _F, 1, True, title="t-derivative of the weight"),
    "DL_1_19": _Entry(_weight_check("DL_1_19"), _F, 0, title="lambda-derivative of the weight"),
    "PDE_1_20": _Entry(_weight_check("PDE_1_20"), _F, 0, True, title="weight PDE"),
    "ODE_1_21": _Entry(_weight_check("ODE_1_21"), _F, 0, True, title="weight ODE in t"),
    "GRAM_1_1": _Entry(_gram, _A, 0, title="orthonormality up to degree n"),
    "CD_1_16": _Entry(_cd, _A, 0, title="Christoffel-Darboux"),
    "SHIFT1_2_17": _Entry(_expansion(1), _A, 0, title="p_n(x+1) expansion with c_{n,j}"),
    "COR2_CNN1": _Entry(_cnn1, _A, 1, title="c_{n,n-1} = n/A_n"),
    "C_2_20": _Entry(_c_derivative_form, _F, 2, True, title="c_{n,j} derivative form vs direct sum"),
    "SHIFT1_2_25": _Entry(_shift_2_25, _F, 1, True, title="structural shift relation"),
    "SUM_2_26": _Entry(_sum_2_26, _F, 1, True, title="sum rule for the connection coefficients"),
    "SHIFT1_2_28": _Entry(_shift_2_28, _F, 1, True, title="forward-difference structural relation"),
    "SUM_2_29": _Entry(_sum_2_29, _F, 0, True, title="sum of p_n^2 d(omega)/dt"),
    "SUM_2_30": _Entry(_sum_2_30, _F, 0, True, title="sum of p_n(k+1)^2 omega_k via derivatives"),
    "SUM_2_31": _Entry(_sum_2_31, _A, 1, title="sum of p_n(k+1)^2 omega_k via c_{n,j}"),
    "SUM_2_32": _Entry(_sum_2_32, _F, 1, True, title="sum of squared c_{n,j}, j <= n-2"),
    "SHIFT2_2_33": _Entry(_expansion(2), _A, 0, title="p_n(x+2) expansion with d_{n,j}"),
    "D_NN1": _Entry(_dnn1, _A, 1, title="d_{n,n-1} = 2n/A_n"),
    "D_2_36": _Entry(_d_2_36, _F, 4, True, title="d_{n,j} derivative form, j < n-3"),
    "D_2_37": _Entry(_d_2_37, _F, 3, True, title="d_{n,n-3}"),
    "D_2_38": _Entry(_d_2_38, _F, 2, True, title="d_{n,n-2}"),
    "SUM_2_40": _Entry(_sum_2_40, _A, 0, title="sum of p_n(k) k^(n+2) omega_k"),
    "D_2_41": _Entry(_d_2_41, _F, 1, True, True, title="d_{n,n-1} long form"),
    "THM3_2_43": _Entry(_thm3("printed"), _F, 2, True, True,
                        title="kernel relation with p_{n-1}(k)"),
    "THM3_2_43_ALT": _Entry(_thm3("kernel"), _F, 2, True, True,
                            title="kernel relation with p_{n-1}(x)"),
    "COR1_2_10": _Entry(_corollary1, _A, 1, True, tolerance=COROLLARY1_TOL,
                        title="vanishing integrals of f_n"),
    "L_3_2_3_5": _Entry(_l_3_2_3_5, _F, 0, title="lambda differential-difference equation"),
    "L_3_4": _Entry(_l_3_4, _F, 0, title="B_n from d(a_n)/d(lambda)"),
    "L_3_6": _Entry(_l_3_6, _F, 0, title="A_{n+1}^2 + A_n^2 + lambda d/dl(...) = 0"),
    "L_3_7": _Entry(_l_3_7, _F, 1, title="A_n^2 + lambda d/dl(b_n/a_n) = 0"),
    "TODA_3_8": _Entry(_toda_3_8, _F, 0, title="Toda: lambda dB_n/dl"),
    "TODA_3_9": _Entry(_toda_3_9, _F, 1, title="Toda: lambda dA_n^2/dl"),
    "L_3_10": _Entry(_l_3_10, _A, 1, title="a_n b_n B_n + 2 a_{n-1}^2 = 0"),
    "L_3_11": _Entry(_l_3_11, _A, 1, title="B_{n-1} B_n B_{n+1} = A_{n+1}^2 (B_n - B_{n+1})"),
    "L_3_12": _Entry(_l_3_12, _A, 1, title="(b_n/a_n) B_n + 2 A_n^2 = 0"),
    "NU_3_14": _Entry(_nu_3_14, _A, 2, title="quasi-orthogonality of p^nu_n(x+1)"),
    "NU_3_15": _Entry(_nu_3_15, _A, 1, title="two-term nu-shift expansion"),
    "NU_3_19": _Entry(_nu_3_19, _A, 1, title="gamma_{n,n-1} from leading coefficients"),
    "NU_3_20": _Entry(_nu_3_20, _A, 0, title="gamma_{n,n} = a_n^nu / a_n^{nu+1}"),
    "NU_3_21": _Entry(_nu_3_21, _A, 1, title="gamma_{n,n-1} via gamma_{n,n}"),
    "NU_3_22": _Entry(_nu_3_22, _A, 1, title="gamma_{n,n-1} closed forms"),
    "NU_3_23": _Entry(_nu_3_23, _A, 1, title="squared ratio relation"),
    "NU_3_24": _Entry(_nu_3_24, _A, 0, title="gamma_{n,n}^2 relation"),
    "NU_3_25": _Entry(_nu_3_25, _A, 1, title="B_n^nu from gammas"),
    "NU_3_26": _Entry(_nu_3_26, _A, 0, title="1 + B_n^{nu+1} from gammas"),
    "NU_3_27": _Entry(_nu_3_27, _A, 0, title="1 + B_n^{nu+1}, second form"),
    "NU_3_28": _Entry(_nu_3_28, _A, 1, title="gamma_{n,n-1}^2 + gamma_{n,n}^2"),
    "NU_3_29": _Entry(_nu_3_29, _A, 0, title="gamma_{n+1,n}^2 + gamma_{n,n}^2"),
    "NU_3_30": _Entry(_nu_3_30, _A, 1, title="gamma_{n,n}^2 first closed form"),
    "NU_3_31": _Entry(_nu_3_31, _A, 1, title="gamma_{n,n}^2 second closed form"),
    "NU_3_32": _Entry(_nu_3_32, _A, 1, title="compatibility of the two forms"),
    "NU_3_19_3_32": _Entry(_nu_all, _A, 1, title="all nu-shift relations"),
    "BWD_3_35": _Entry(_bwd_3_35, _A, 0, title="backward-difference orthogonality"),
    "BWD_3_36": _Entry(_bwd_3_36, _A, 0, True, title="expanded backward-difference form"),
    "Q_4_10": _Entry(_q_4_10, _F, 0, True, title="(t d/dt - l d/dl) log alpha_n = h_n/2"),
    "Q_4_11": _Entry(_q_4_11, _F, 0, True, title="Q-family differential-difference equation"),
    "QTODA_4_12": _Entry(_q_4_12, _F, 0, True, title="Toda-type equation for h_n"),
    "QTODA_4_13": _Entry(_q_4_13, _F, 1, True, title="Toda-type equation for q_n^2"),
    "Q_4_14": _Entry(_q_4_14, _A, 1, title="2 q_n^2 + h_n beta_n/alpha_n = 0"),
}

_NU_PARTS.update({k: v.check for k, v in CATALOG.items() if k.startswith("NU_3_")})

REPORT_MODE = frozenset(k for k, v in CATALOG.items() if v.report_mode)


def identity_ids() -> list:
    return sorted(CATALOG)


def applicable(id: str, p: Params, n: int) -> bool:
    """Whether (id, p, n) lies in the identity's domain."""
    entry = CATALOG[id]
    if not entry.min_n <= n <= MAX_N:
        return False
    if id == "COR1_2_10" and n > COROLLARY1_MAX_N:
        return False
    return not (entry.needs_t and float(p.t) <= 0)


def _evaluate(entry: _Entry, p: Params, n: int, ctx: PrecisionContext, h: mpf):
    with ctx.working():
        e = _Env(p, n, ctx, h)
        groups, notes = entry.check(e)
        return _worst(groups), notes


def verify_identity(id: str, p: Params, n: int, ctx: PrecisionContext, step=None) -> IdentityReport:
    """Evaluate one catalogued identity at (p, n) and report its normalized residual.

    Finite-difference identities are evaluated at steps h and h/2; the second
    residual is kept in ``residual_half_step`` to expose the convergence order.
    """
    try:
        entry = CATALOG[id]
    except KeyError:
        raise KeyError(f"unknown identity id {id!r}") from None
    if not entry.min_n <= n <= MAX_N:
        raise DomainError(f"{id} needs {entry.min_n} <= n <= {MAX_N}, got n={n}")
    with ctx.working():
        nu, t, lam = p.mp()
        if entry.needs_t and t <= 0:
            raise DomainError(f"{id} involves t-derivatives or t > 0 only quantities; need t > 0")
        h = to_mpf(step) if step is not None else ctx.step()
        if h < mpmath.ldexp(1, -ctx.bits // 3):
            raise DomainError("finite-difference step below the precision floor")
        residual, notes = _evaluate(entry, p, n, ctx, h)
        half = None
        if entry.kind == _F:
            half, _ = _evaluate(entry, p, n, ctx, h / 2)
            ratio = residual / half if half else mpf("inf")
            extra = f"residual(h/2)={_fmt(half)}; ratio={_fmt(ratio)}"
            notes = f"{notes}; {extra}" if notes else extra
        if entry.tolerance is not None:
            tol = entry.tolerance
        else:
            tol = ctx.tol_fd if entry.kind == _F else ctx.tol_identity
        if entry.report_mode:
            notes = f"report-mode; {notes}"
        return IdentityReport(id, p, n, residual, tol, bool(residual <= tol), entry.kind,
                              notes, entry.report_mode, half)
