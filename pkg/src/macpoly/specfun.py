"""Extended-precision special functions.

The central object is

    rho_mu(t) = 2 t^(mu/2) K_mu(2 sqrt(t)) = int_0^inf exp(-t/x - x) x^(mu-1) dx,

evaluated by a trapezoidal rule on the real line after the substitution
``x = exp(u)``.  The integrand then decays doubly exponentially on both sides,
so the trapezoidal sums converge geometrically in the number of level halvings.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mpf

__all__ = [
    "PrecisionContext",
    "DomainError",
    "PrecisionError",
    "ConvergenceError",
    "to_mpf",
    "gamma",
    "rho",
    "rho_sequence",
    "laguerre",
    "fractional_integral",
]

_GUARD_BITS = 24
_MAX_LEVELS = 14


class DomainError(ValueError):
    """Argument outside the domain of the function."""


class PrecisionError(ArithmeticError):
    """A computation failed to reach its accuracy target."""


class ConvergenceError(PrecisionError):
    """An adaptive quadrature reported an error estimate above target."""


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and the tolerances derived from it.

    ``tol_identity`` is the pass threshold for exact (derivative-free)
    identities evaluated on truncated lattices; it sits between
    ``tol_algebraic`` (accuracy target of single evaluations) and ``tol_fd``.
    """

    bits: int = 256
    tol_algebraic: float = 1e-30
    tol_fd: float = 1e-12
    fd_step: float = 1e-10
    tol_identity: float = 1e-25

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < 64:
            raise ValueError(f"bits must be an integer >= 64, got {self.bits!r}")
        if not 0 < self.tol_algebraic < self.tol_fd < 1:
            raise ValueError("need 0 < tol_algebraic < tol_fd < 1")
        if not self.tol_algebraic <= self.tol_identity <= self.tol_fd:
            raise ValueError("need tol_algebraic <= tol_identity <= tol_fd")
        if not 0 < self.fd_step < 1:
            raise ValueError("need 0 < fd_step < 1")

    def working(self, extra: int = 0):
        """Context manager switching mpmath to this precision (plus ``extra`` bits)."""
        return mpmath.workprec(self.bits + extra)

    @property
    def dps(self) -> int:
        return int(self.bits * math.log10(2)) + 1

    def step(self) -> mpf:
        return to_mpf(self.fd_step)

    def escalated(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.bits, self.tol_algebraic, self.tol_fd,
                                self.fd_step, self.tol_identity)


def to_mpf(x) -> mpf:
    """Convert at the current precision; floats go through their shortest repr
    so that ``0.8`` means the decimal 0.8 rather than its binary neighbour."""
    if isinstance(x, mpf):
        return +x
    if isinstance(x, float):
        return mpf(repr(x))
    return mpf(x)


def gamma(x, ctx: PrecisionContext) -> mpf:
    """Euler's gamma function for x > 0."""
    with ctx.working(_GUARD_BITS):
        x = to_mpf(x)
        if x <= 0:
            raise DomainError(f"gamma is only provided for x > 0, got {x}")
        g = mpmath.gamma(x)
    with ctx.working():
        return +g


def _bracket(g, u0: float, direction: int, drop: float) -> float:
    # first u on one side of the peak with g(u0) - g(u) > drop
    g0 = g(u0)
    d = 1.0
    while g0 - g(u0 + direction * d) <= drop:
        d *= 2.0
        if d > 1e4:
            raise PrecisionError("could not bracket the integrand tail")
    lo, hi = d / 2.0, d
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if g0 - g(u0 + direction * mid) > drop:
            hi = mid
        else:
            lo = mid
    return u0 + direction * hi


def _log_integrand_float(mu: float, t: float):
    def g(u):
        try:
            return -t * math.exp(-u) - math.exp(u) + mu * u
        except OverflowError:
            return -math.inf
    return g


def line_trapezoid(f, center, left: float, right: float, h: float, bits: int, scale=None):
    """Trapezoidal sums of int f(u) du over [center+left, center+right], halving
    the step until two successive levels agree to 2^(16-bits) relative.

    ``scale`` replaces |value| as the reference magnitude, for integrals that
    cancel to (nearly) zero.
    """
    hm = mpf(h)
    jl, jr = int(math.floor(left / h)), int(math.ceil(right / h))
    total = mpmath.fsum(f(center + j * hm) for j in range(jl, jr + 1))
    estimate = hm * total
    target = mpmath.ldexp(1, -bits + 16)
    for _ in range(_MAX_LEVELS):
        hm /= 2
        jl, jr = 2 * jl - 1, 2 * jr + 1
        total += mpmath.fsum(f(center + j * hm) for j in range(jl, jr + 1, 2))
        new = hm * total
        ref = abs(new) if scale is None else scale
        if abs(new - estimate) <= target * ref:
            return new
        estimate = new
    raise PrecisionError("trapezoidal sums did not converge")


def _rho_integral(mu: mpf, t: mpf, bits: int) -> mpf:
    """int exp(-t e^-u - e^u + mu u) du for t > 0."""
    # peak of the exponent: e^u = (mu + sqrt(mu^2 + 4t)) / 2
    y = (mu + mpmath.sqrt(mu * mu + 4 * t)) / 2
    center = mpmath.log(y)
    curvature = float(t / y + y)
    gf = _log_integrand_float(float(mu), float(t))
    drop = bits * math.log(2.0) + 40.0
    cf = float(center)
    left = _bracket(gf, cf, -1, drop) - cf
    right = _bracket(gf, cf, +1, drop) - cf

    def f(u):
        return mpmath.exp(-t * mpmath.exp(-u) - mpmath.exp(u) + mu * u)

    try:
        return line_trapezoid(f, center, left, right, min(0.5, 1.0 / math.sqrt(curvature)), bits)
    except PrecisionError:
        raise PrecisionError(f"rho quadrature did not converge for mu={mu}, t={t}") from None


def rho(mu, t, ctx: PrecisionContext) -> mpf:
    """rho_mu(t) = 2 t^(mu/2) K_mu(2 sqrt t) for t >= 0.

    Orders mu <= 0 (only allowed for t > 0) use rho_mu(t) = t^mu rho_{-mu}(t).
    At t = 0 the value is Gamma(mu).
    """
    bits = ctx.bits + _GUARD_BITS
    with mpmath.workprec(bits):
        mu, t = to_mpf(mu), to_mpf(t)
        if t < 0:
            raise DomainError(f"rho needs t >= 0, got t={t}")
        if t == 0:
            if mu <= 0:
                raise DomainError(f"rho_mu(0) diverges for mu={mu} <= 0")
            value = mpmath.gamma(mu)
        elif mu <= 0:
            value = t ** mu * _rho_integral(-mu, t, bits)
        else:
            value = _rho_integral(mu, t, bits)
    with ctx.working():
        return +value


def rho_sequence(mu0, count: int, t, ctx: PrecisionContext) -> list:
    """[rho_{mu0}(t), rho_{mu0+1}(t), ..., rho_{mu0+count-1}(t)].

    Two seeds come from :func:`rho`; the rest from the upward recurrence
    rho_{m+1} = m rho_m + t rho_{m-1}, which is stable in this direction
    (rho grows like Gamma(m)).
    """
    if count <= 0:
        return []
    with ctx.working(_GUARD_BITS):
        mu0, t = to_mpf(mu0), to_mpf(t)
        out = [rho(mu0, t, ctx)]
        if count > 1:
            out.append(rho(mu0 + 1, t, ctx))
        for i in range(2, count):
            m = mu0 + i - 1
            out.append(m * out[-1] + t * out[-2])
    with ctx.working():
        return [+v for v in out]


def laguerre(n: int, alpha, x):
    """Generalized Laguerre polynomial by its explicit finite sum.

    Evaluated at the current mpmath precision; ``alpha`` may be any real.
    """
    if n < 0:
        raise DomainError("laguerre degree must be non-negative")
    alpha, x = to_mpf(alpha), to_mpf(x)
    total = mpf(0)
    power = mpf(1)
    for m in range(n + 1):
        term = mpmath.binomial(n + alpha, n - m) * power / mpmath.factorial(m)
        total += -term if m % 2 else term
        power *= x
    return total


def fractional_integral(f, alpha, t, ctx: PrecisionContext) -> mpf:
    """Right-sided Riemann-Liouville integral (1/Gamma(a)) int_t^inf (x-t)^(a-1) f(x) dx.

    ``f`` is called with mpf arguments and must decay fast enough at infinity.
    """
    with ctx.working(_GUARD_BITS):
        alpha, t = to_mpf(alpha), to_mpf(t)
        if alpha <= 0 or t <= 0:
            raise DomainError("need alpha > 0 and t > 0")
        value, err = mpmath.quad(lambda x: (x - t) ** (alpha - 1) * f(x),
                                 [t, t + 1, t + 10, mpmath.inf], error=True)
        if err > ctx.tol_algebraic * abs(value):
            raise ConvergenceError(f"fractional integral error estimate {err} too large")
        value /= mpmath.gamma(alpha)
    with ctx.working():
        return +value
