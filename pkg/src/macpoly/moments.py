"""Power and factorial moments of the lattice weight.

Closed forms (Stirling numbers of the second kind times rho at the contracted
argument t(1 - lambda)) plus a direct lattice-sum oracle.
"""
from __future__ import annotations

from functools import lru_cache

import mpmath
from mpmath import mpf

from .specfun import PrecisionContext, rho, rho_sequence
from .weight_measure import Params, truncate_measure

__all__ = [
    "stirling2",
    "power_moment",
    "factorial_moment",
    "factorial_moments",
    "moment_bruteforce",
]


@lru_cache(maxsize=None)
def stirling2(n: int, j: int) -> int:
    """Stirling number of the second kind S(n, j), exact."""
    if j < 0 or n < 0 or j > n:
        raise IndexError(f"stirling2 needs 0 <= j <= n, got n={n}, j={j}")
    if n == 0:
        return 1
    if j == 0:
        return 0
    lower = stirling2(n - 1, j) if j <= n - 1 else 0
    return j * lower + stirling2(n - 1, j - 1)


def _contracted(p: Params):
    nu, t, lam = p.mp()
    return nu, t * (1 - lam), lam


def factorial_moments(p: Params, count: int, ctx: PrecisionContext) -> list:
    """[gamma_0, ..., gamma_{count-1}] with
    gamma_n = lambda^n rho_{nu+n+1}(t(1-lambda)) / (1-lambda)^(nu+n+1)."""
    with ctx.working(16):
        nu, s, lam = _contracted(p)
        rhos = rho_sequence(nu + 1, count, s, ctx)
        q = lam / (1 - lam)
        scale = (1 - lam) ** -(nu + 1)
        out = []
        for r in rhos:
            out.append(r * scale)
            scale *= q
    with ctx.working():
        return [+g for g in out]


def factorial_moment(n: int, p: Params, ctx: PrecisionContext) -> mpf:
    with ctx.working(16):
        nu, s, lam = _contracted(p)
        value = lam**n * rho(nu + n + 1, s, ctx) / (1 - lam) ** (nu + n + 1)
    with ctx.working():
        return +value


def power_moment(n: int, p: Params, ctx: PrecisionContext) -> mpf:
    with ctx.working(16):
        gammas = factorial_moments(p, n + 1, ctx)
        value = mpmath.fsum(stirling2(n, j) * gammas[j] for j in range(n + 1))
    with ctx.working():
        return +value


def moment_bruteforce(n: int, p: Params, kind: str, ctx: PrecisionContext, measure=None) -> mpf:
    """Direct lattice sum of omega_k k^n (power) or omega_k k!/(k-n)! (factorial)."""
    if kind not in ("power", "factorial"):
        raise ValueError(f"kind must be 'power' or 'factorial', got {kind!r}")
    m = measure if measure is not None else truncate_measure(p, n, ctx)
    if m.poly_degree_cap * 2 < n:
        raise ValueError("measure degree cap too small for this moment")
    with ctx.working():
        if kind == "power":
            terms = (w * mpf(k) ** n for k, w in enumerate(m.weights))
        else:
            terms = (w * mpmath.ff(k, n) for k, w in enumerate(m.weights) if k >= n)
        return mpmath.fsum(terms)
