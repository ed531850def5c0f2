"""Richardson-extrapolated finite differences for scalar or list-valued functions.

Every rule combines step sizes h and h/2 so that the leading error term of the
underlying stencil cancels: central differences become O(h^4), forward ones O(h^2).
"""
from __future__ import annotations

from mpmath import mpf


def _lin(a, x, b, y):
    # a*x + b*y, elementwise when x, y are sequences
    if isinstance(x, (list, tuple)):
        return [a * u + b * v for u, v in zip(x, y)]
    return a * x + b * y


def central(f, x, h):
    """df/dx at x."""
    def d(s):
        return _lin(1 / (2 * s), f(x + s), -1 / (2 * s), f(x - s))
    return _lin(mpf(4) / 3, d(h / 2), -mpf(1) / 3, d(h))


def forward(f, x, h):
    """One-sided df/dx at a boundary point x."""
    fx = f(x)

    def d(s):
        return _lin(1 / s, f(x + s), -1 / s, fx)
    return _lin(2, d(h / 2), -1, d(h))


def second_central(f, x, h):
    """d2f/dx2 at x; the extrapolated combination is a 5-point stencil."""
    fx = f(x)

    def d(s):
        return _lin(1 / s**2, _lin(1, f(x + s), 1, f(x - s)), -2 / s**2, fx)
    return _lin(mpf(4) / 3, d(h / 2), -mpf(1) / 3, d(h))
