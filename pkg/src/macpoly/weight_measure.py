"""The lattice weight omega_k = rho_{k+nu+1}(t) lambda^k / k! and its truncation."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
from mpmath import mpf

from .numdiff import central, forward, second_central
from .specfun import DomainError, PrecisionContext, rho, rho_sequence, to_mpf

__all__ = [
    "Params",
    "TruncatedMeasure",
    "TruncationError",
    "WEIGHT_IDENTITIES",
    "weight",
    "weights",
    "truncate_measure",
    "weight_residual",
]

MAX_LATTICE = 10**6


class TruncationError(RuntimeError):
    """The geometric tail majorant could not be certified."""


@dataclass(frozen=True)
class Params:
    """Parameter triple (nu, t, lambda) with nu > -1, t >= 0, 0 < lambda < 1.

    Fields keep whatever numeric type they were given (float, int, str or mpf)
    and are converted with :func:`to_mpf` at the precision in force.
    """

    nu: object
    t: object
    lam: object

    def __post_init__(self):
        nu, t, lam = (float(to_mpf(v)) for v in (self.nu, self.t, self.lam))
        if not nu > -1:
            raise DomainError(f"nu must exceed -1, got {self.nu}")
        if not t >= 0:
            raise DomainError(f"t must be non-negative, got {self.t}")
        if not 0 < lam < 1:
            raise DomainError(f"lambda must lie in (0, 1), got {self.lam}")

    def mp(self):
        return to_mpf(self.nu), to_mpf(self.t), to_mpf(self.lam)

    def replace(self, **kw) -> "Params":
        d = {"nu": self.nu, "t": self.t, "lam": self.lam}
        d.update(kw)
        return Params(**d)

    def label(self) -> str:
        return f"nu={_short(self.nu)}, t={_short(self.t)}, lambda={_short(self.lam)}"


def _short(v) -> str:
    return mpmath.nstr(v, 12) if isinstance(v, mpf) else str(v)


@dataclass(frozen=True)
class TruncatedMeasure:
    params: Params
    K: int
    weights: tuple
    tail_bound: mpf
    poly_degree_cap: int

    def __len__(self):
        return self.K + 1


@lru_cache(maxsize=4096)
def weight(k: int, p: Params, ctx: PrecisionContext) -> mpf:
    """omega_k, with rho evaluated directly by quadrature."""
    if k < 0:
        raise DomainError("lattice index must be non-negative")
    with ctx.working(16):
        nu, t, lam = p.mp()
        value = rho(k + nu + 1, t, ctx) * lam**k / mpmath.factorial(k)
    with ctx.working():
        return +value


def weights(p: Params, K: int, ctx: PrecisionContext) -> list:
    """omega_0..omega_K via two quadrature seeds and the upward rho recurrence."""
    with ctx.working(16):
        nu, t, lam = p.mp()
        rhos = rho_sequence(nu + 1, K + 1, t, ctx)
        out = []
        scale = mpf(1)
        for k, r in enumerate(rhos):
            if k:
                scale = scale * lam / k
            out.append(r * scale)
    with ctx.working():
        return [+w for w in out]


def _log_majorant(k: int, nu: float, lam: float, degree: int) -> float:
    # log of Gamma(k+nu+1) k^degree lam^k / k!
    return (math.lgamma(k + nu + 1) - math.lgamma(k + 1) + k * math.log(lam)
            + (degree * math.log(k) if degree else 0.0))


def _ratio(k: int, nu: float, lam: float, degree: int) -> float:
    # non-increasing bound on majorant[j+1]/majorant[j] for all j >= k
    return lam * max(1.0, (k + nu + 1) / (k + 1)) * (1 + 1 / k) ** degree


@lru_cache(maxsize=256)
def truncate_measure(p: Params, N_max: int, ctx: PrecisionContext) -> TruncatedMeasure:
    """Truncate the lattice where sum_{k>K} omega_k k^(2 N_max) < tol_algebraic omega_0.

    Uses rho_mu(t) <= Gamma(mu): from the first index where the majorant's
    term ratio is below r < 1 the tail is bounded by a geometric series.
    """
    degree = 2 * N_max
    with ctx.working():
        nu, t, lam = p.mp()
        w0 = weight(0, p, ctx)
    nuf, lamf = float(nu), float(lam)
    log_target = math.log(ctx.tol_algebraic) + float(mpmath.log(w0)) - 1.0
    K = 0
    while True:
        k = K + 1
        r = _ratio(k, nuf, lamf, degree)
        if r < 1:
            log_tail = _log_majorant(k, nuf, lamf, degree) - math.log1p(-r)
            if log_tail < log_target:
                break
        K += 1
        if K > MAX_LATTICE:
            raise TruncationError(f"tail not certified below K={MAX_LATTICE} for {p.label()}")
    with ctx.working():
        k = mpf(K + 1)
        r = lam * max(mpf(1), (k + nu + 1) / (k + 1)) * (1 + 1 / k) ** degree
        tail = (mpmath.gamma(k + nu + 1) / mpmath.gamma(k + 1) * k**degree
                * lam ** (K + 1) / (1 - r))
        w = weights(p, K, ctx)
    return TruncatedMeasure(p, K, tuple(w), tail, N_max)


WEIGHT_IDENTITIES = ("PEARSON_1_17", "DT_1_18", "DL_1_19", "PDE_1_20", "ODE_1_21")
_MIN_K = {"PEARSON_1_17": 2, "DT_1_18": 1, "DL_1_19": 0, "PDE_1_20": 0, "ODE_1_21": 0}


def _normalized(terms) -> mpf:
    scale = max(abs(x) for x in terms)
    total = abs(mpmath.fsum(terms))
    return total / scale if scale else total


def weight_residual(id: str, k: int, p: Params, ctx: PrecisionContext, step=None) -> mpf:
    """Normalized residual of one of the weight's difference/differential equations.

    Parameter derivatives are Richardson-extrapolated central differences with
    steps h and h/2 (h = ``step`` or ``ctx.fd_step``).  At t = 0 the t-derivatives
    fall back to one-sided differences; such residuals are informational only.
    """
    if id not in _MIN_K:
        raise KeyError(f"unknown weight identity {id!r}")
    if k < _MIN_K[id]:
        raise DomainError(f"{id} needs k >= {_MIN_K[id]}")
    with ctx.working():
        h = to_mpf(step) if step is not None else ctx.step()
        nu, t, lam = p.mp()

        def w_t(j):
            return lambda s: weight(j, p.replace(t=s), ctx)

        def w_l(j):
            return lambda s: weight(j, p.replace(lam=s), ctx)

        d_t = forward if t == 0 else central
        if id == "PEARSON_1_17":
            w = [weight(k - 2, p, ctx), weight(k - 1, p, ctx), weight(k, p, ctx)]
            terms = [k * (k - 1) * w[2], -(k - 1) * (k + nu) * lam * w[1], -t * lam**2 * w[0]]
        elif id == "DT_1_18":
            terms = [d_t(w_t(k), t, h), lam / k * weight(k - 1, p, ctx)]
        elif id == "DL_1_19":
            terms = [lam * central(w_l(k), lam, h), -k * weight(k, p, ctx)]
        elif id == "PDE_1_20":
            terms = [lam * central(w_l(k), lam, h), -t * d_t(w_t(k), t, h),
                     -central(w_l(k + 1), lam, h), (nu + 1) * weight(k, p, ctx)]
        else:
            if t == 0:
                d2 = (weight(k, p.replace(t=2 * h), ctx) - 2 * weight(k, p.replace(t=h), ctx)
                      + weight(k, p, ctx)) / h**2
            else:
                d2 = second_central(w_t(k), t, h)
            terms = [t * d2, -(k + nu) * d_t(w_t(k), t, h), -weight(k, p, ctx)]
        return _normalized(terms)
