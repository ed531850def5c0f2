import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mpf

from macpoly.moments import (
    factorial_moment,
    factorial_moments,
    moment_bruteforce,
    power_moment,
    stirling2,
)
from macpoly.specfun import PrecisionContext, rho
from macpoly.weight_measure import Params

CTX = PrecisionContext()


def test_stirling_table():
    assert [stirling2(5, j) for j in range(6)] == [0, 1, 15, 25, 10, 1]
    assert stirling2(0, 0) == 1
    with pytest.raises(IndexError):
        stirling2(3, 4)


@given(n=st.integers(0, 12), x=st.integers(0, 40))
def test_stirling_converts_powers_to_falling_factorials(n, x):
    falling = [1]
    for j in range(n):
        falling.append(falling[-1] * (x - j))
    assert sum(stirling2(n, j) * falling[j] for j in range(n + 1)) == x**n


def test_zeroth_moment_closed_form():
    p = Params(0, 1, 0.5)
    with CTX.working():
        expected = rho(1, 0.5, CTX) / mpf("0.5")
        assert abs(power_moment(0, p, CTX) - expected) <= mpf(10) ** -70 * expected


def test_meixner_factorial_moments():
    p = Params(0.5, 0, 0.4)
    with CTX.working():
        lam = mpf("0.4")
        for n, g in enumerate(factorial_moments(p, 5, CTX)):
            exact = mpmath.gamma(n + 1.5) * lam**n / (1 - lam) ** (n + 1.5)
            assert abs(g - exact) <= mpf(10) ** -70 * exact


@pytest.mark.parametrize("p", [Params(-0.5, 0.25, 0.8), Params(1.5, 4, 0.2), Params(0, 1, 0.5)])
def test_closed_forms_match_lattice_sums(p):
    with CTX.working():
        for n in range(5):
            for kind, closed in (("power", power_moment(n, p, CTX)),
                                 ("factorial", factorial_moment(n, p, CTX))):
                assert abs(closed - moment_bruteforce(n, p, kind, CTX)) <= mpf(10) ** -30 * closed


def test_bruteforce_kind_validation():
    with pytest.raises(ValueError):
        moment_bruteforce(1, Params(0, 1, 0.5), "central", CTX)
