"""Orthogonal polynomials on the non-negative integers for weights built from
the Macdonald function, with a numerical verifier for their structural identities.

The lattice weight is

    omega_k = rho_{k+nu+1}(t) lambda^k / k!,    rho_mu(t) = 2 t^(mu/2) K_mu(2 sqrt t),

for nu > -1, t >= 0 and 0 < lambda < 1.  At t = 0 it reduces to the Meixner weight.
"""
from .identities import (
    CATALOG,
    IdentityReport,
    QFamilyTable,
    build_qfamily,
    connection_c,
    connection_d,
    corollary1_f,
    nu_shift_gammas,
    verify_identity,
)
from .moments import factorial_moment, moment_bruteforce, power_moment, stirling2
from .opoly import (
    BreakdownError,
    PolynomialFamily,
    RecurrenceTable,
    build_recurrence,
    build_recurrence_chebyshev,
    build_recurrence_stieltjes,
    christoffel_darboux_residual,
    eval_poly,
    family_from_table,
    gauss_rule,
    gram_residual,
    meixner_table,
)
from .specfun import (
    ConvergenceError,
    DomainError,
    PrecisionContext,
    PrecisionError,
    fractional_integral,
    gamma,
    laguerre,
    rho,
)
from .weight_measure import Params, TruncatedMeasure, TruncationError, truncate_measure, weight

__version__ = "0.1.0"

__all__ = [
    "CATALOG",
    "BreakdownError",
    "ConvergenceError",
    "DomainError",
    "IdentityReport",
    "Params",
    "PolynomialFamily",
    "PrecisionContext",
    "PrecisionError",
    "QFamilyTable",
    "RecurrenceTable",
    "TruncatedMeasure",
    "TruncationError",
    "build_qfamily",
    "build_recurrence",
    "build_recurrence_chebyshev",
    "build_recurrence_stieltjes",
    "christoffel_darboux_residual",
    "connection_c",
    "connection_d",
    "corollary1_f",
    "eval_poly",
    "factorial_moment",
    "family_from_table",
    "fractional_integral",
    "gamma",
    "gauss_rule",
    "gram_residual",
    "laguerre",
    "meixner_table",
    "moment_bruteforce",
    "nu_shift_gammas",
    "power_moment",
    "rho",
    "stirling2",
    "truncate_measure",
    "verify_identity",
    "weight",
]
