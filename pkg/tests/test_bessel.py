import mpmath
import numpy as np
import pytest

from kickrec.bessel import bessel_j, bessel_orders, truncation_order


def series_oracle(l, z, terms=80):
    """Power series in exact rational/mp arithmetic, independent of the float path."""
    mpmath.mp.dps = 40
    z = mpmath.mpf(z)
    total = mpmath.mpf(0)
    for k in range(terms):
        total += (-1) ** k * (z / 2) ** (2 * k + l) / (mpmath.factorial(k) * mpmath.factorial(k + l))
    return float(total)


def test_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    for l in (-3, -1, 1, 2, 7):
        assert bessel_j(l, 0.0) == 0.0


def test_j0_kick_strength():
    z = 14 / 15
    assert abs(bessel_j(0, z) - series_oracle(0, z)) < 1e-15
    assert round(bessel_j(0, z), 4) == 0.7938
    assert abs(bessel_j(1, z) - series_oracle(1, z)) < 1e-15


def test_sum_of_squares():
    z = 0.9333
    total = sum(bessel_j(l, z) ** 2 for l in range(-30, 31))
    assert abs(total - 1) < 1e-12


def test_reflection():
    for z in (0.5, 3.3, 14.0, 37.0):
        for l in range(1, 12):
            assert bessel_j(-l, z) == pytest.approx((-1) ** l * bessel_j(l, z), abs=1e-15)
            assert bessel_j(l, -z) == pytest.approx((-1) ** l * bessel_j(l, z), abs=1e-15)


@pytest.mark.parametrize("z", [0.3, 2.0, 3.9, 4.1, 7.5, 12.0, 15.0, 22.2, 49.0])
def test_against_mpmath(z):
    mpmath.mp.dps = 30
    for l in range(0, 40):
        assert abs(bessel_j(l, z) - float(mpmath.besselj(l, z))) < 1e-13


def test_out_of_range():
    with pytest.raises(ValueError):
        bessel_j(0, 51.0)


def test_truncation_order():
    z = 14 / 15
    lm = truncation_order(z, 1e-14)
    assert abs(bessel_j(lm, z)) < 1e-14
    assert abs(bessel_j(lm - 1, z)) >= 1e-14
    assert len(bessel_orders(z, lm)) == 2 * lm + 1
