"""Recurrence coefficients flow in lambda like a Toda lattice.

We difference the coefficients in lambda numerically (Richardson-extrapolated
central differences at 256 bits) and compare with the Toda right-hand sides.
Halving the step shrinks the residual about 16-fold, the signature of a
fourth-order rule.
"""
import mpmath

from macpoly import Params, PrecisionContext, verify_identity

ctx = PrecisionContext()
p = Params(0.5, 1.0, 0.4)

for id_ in ("TODA_3_8", "TODA_3_9", "QTODA_4_12", "QTODA_4_13"):
    print(id_)
    for n in range(1, 5):
        r = verify_identity(id_, p, n, ctx)
        ratio = r.residual / r.residual_half_step
        print(f"  n={n}  residual {mpmath.nstr(r.residual, 3):10s} h/2-ratio {mpmath.nstr(ratio, 4)}")
