"""Gauss rules for the lattice weight.

The eigenvalues of the Jacobi matrix are the nodes; the squared first
components of the eigenvectors, scaled by the total mass, are the weights.
An N-point rule integrates k^j exactly for j <= 2N - 1.
"""
import mpmath

from macpoly import Params, PrecisionContext, build_recurrence, gauss_rule, power_moment

ctx = PrecisionContext()
p = Params(-0.5, 0.25, 0.8)
N = 5
nodes, weights = gauss_rule(build_recurrence(p, N, ctx), N, ctx)

print(p.label())
for x, w in zip(nodes, weights):
    print(f"  node {mpmath.nstr(x, 25):30s} weight {mpmath.nstr(w, 25)}")

with ctx.working():
    print("\n j   relative quadrature error")
    for j in range(2 * N + 1):
        mu = power_moment(j, p, ctx)
        q = mpmath.fsum(w * x**j for x, w in zip(nodes, weights))
        note = "" if j < 2 * N else "   (degree 2N: no longer exact)"
        print(f"{j:2d}   {mpmath.nstr(abs(q - mu) / mu, 3)}{note}")
