"""Audit of the structural relations at one parameter point.

Every catalogued relation is evaluated.  A few printed forms do not vanish;
for those the report notes carry the residual of a corrected reading where
one is known.
"""
from macpoly import CATALOG, Params, PrecisionContext, verify_identity
from macpoly.identities import applicable

ctx = PrecisionContext()
p = Params(0.5, 1.0, 0.5)
n = 3

for id_ in sorted(CATALOG):
    if not applicable(id_, p, n):
        continue
    r = verify_identity(id_, p, n, ctx)
    status = "pass" if r.passed else ("report" if r.report_mode else "FAIL")
    print(f"{id_:15s} {status:6s} {float(r.residual):10.2e}  {r.notes[:90]}")
