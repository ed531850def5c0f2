"""Three-term recurrence coefficients from two independent constructions.

The modified Chebyshev algorithm works from the closed-form factorial moments;
the Stieltjes procedure works directly on the truncated lattice.  Their
agreement is the main check that both the moments and the truncation are right.
At t = 0 both reduce to the Meixner coefficients.
"""
import mpmath

from macpoly import (
    Params,
    PrecisionContext,
    build_recurrence_chebyshev,
    build_recurrence_stieltjes,
    meixner_table,
    truncate_measure,
)

ctx = PrecisionContext()
N = 8

for p in (Params(0.5, 1.0, 0.5), Params(1.5, 4.0, 0.8)):
    cheb = build_recurrence_chebyshev(p, N, ctx)
    stie = build_recurrence_stieltjes(truncate_measure(p, N, ctx), N, ctx)
    print(p.label())
    print(" n   A_n (Chebyshev)            B_n (Chebyshev)            max deviation")
    with ctx.working():
        for n in range(1, N + 1):
            dev = max(abs(cheb.A[n] - stie.A[n]), abs(cheb.B[n - 1] - stie.B[n - 1]))
            print(f"{n:2d}   {mpmath.nstr(cheb.A[n], 22):26s} {mpmath.nstr(cheb.B[n - 1], 22):26s}"
                  f" {mpmath.nstr(dev, 3)}")
    print()

p0 = Params(0.5, 0.0, 0.3)
cheb = build_recurrence_chebyshev(p0, N, ctx)
ref = meixner_table(0.5, 0.3, N, ctx)
with ctx.working():
    worst = max(max(abs(a * a - b * b) for a, b in zip(cheb.A, ref.A)),
                max(abs(a - b) for a, b in zip(cheb.B, ref.B)))
print(f"t = 0, largest deviation from the Meixner formulas: {mpmath.nstr(worst, 3)}")
