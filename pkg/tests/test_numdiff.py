import mpmath
from mpmath import mpf

from macpoly.numdiff import central, forward, second_central


def test_central_is_fourth_order():
    with mpmath.workprec(256):
        x = mpf("0.7")
        errs = [abs(central(mpmath.sin, x, h) - mpmath.cos(x)) for h in (mpf("1e-3"), mpf("5e-4"))]
        assert 14 < errs[0] / errs[1] < 18


def test_forward_is_second_order():
    with mpmath.workprec(256):
        x = mpf(1)
        errs = [abs(forward(mpmath.exp, x, h) - mpmath.e) for h in (mpf("1e-3"), mpf("5e-4"))]
        assert 3.5 < errs[0] / errs[1] < 4.5


def test_second_central_and_list_values():
    with mpmath.workprec(256):
        x, h = mpf(2), mpf("1e-10")
        d2 = second_central(mpmath.exp, x, h)
        assert abs(d2 - mpmath.exp(x)) < mpf(10) ** -30
        d = central(lambda s: [s**2, s**3], x, h)
        assert abs(d[0] - 4) < mpf(10) ** -60 and abs(d[1] - 12) < mpf(10) ** -60
