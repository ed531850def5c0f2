"""The lattice weight and its moments.

The weight omega_k = rho_{k+nu+1}(t) lambda^k / k! interpolates between the
Meixner weight (t = 0) and heavier-tailed sequences as t grows.  Its power
moments have a closed form through rho at the contracted argument t(1 - lambda);
here we compare that closed form with a direct sum over the truncated lattice.
"""
import mpmath

from macpoly import Params, PrecisionContext, moment_bruteforce, power_moment, rho, truncate_measure

ctx = PrecisionContext()

# rho_{1/2}(t) has the elementary form sqrt(pi) exp(-2 sqrt t)
with ctx.working():
    print("rho_1/2(1)       =", mpmath.nstr(rho(0.5, 1, ctx), 30))
    print("sqrt(pi) e^-2    =", mpmath.nstr(mpmath.sqrt(mpmath.pi) * mpmath.exp(-2), 30))

p = Params(0.5, 1.0, 0.5)
m = truncate_measure(p, 6, ctx)
print(f"\n{p.label()}: lattice truncated at K = {m.K}, tail bound {mpmath.nstr(m.tail_bound, 3)}")

print("\n n   closed form                        |closed - lattice sum| / closed")
with ctx.working():
    for n in range(7):
        closed = power_moment(n, p, ctx)
        brute = moment_bruteforce(n, p, "power", ctx, measure=m)
        print(f"{n:2d}   {mpmath.nstr(closed, 30):34s} {mpmath.nstr(abs(closed - brute) / closed, 3)}")
