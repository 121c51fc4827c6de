import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncoscillator.errors import DomainError
from ncoscillator.special_fn import (bessel_j0, bessel_j0_y0_with_derivatives, bessel_y0,
                                  hyper_u_coefficients, hyper_u_neg_int)


def test_j0_at_origin():
    assert bessel_j0(0.0) == pytest.approx(1.0, abs=1e-15)


def test_first_zero_of_j0():
    zero = float(mpmath.besseljzero(0, 1))
    assert abs(bessel_j0(zero)) < 1e-10
    assert zero == pytest.approx(2.404825557695773, abs=1e-14)


def test_y0_at_one():
    assert bessel_y0(1.0) == pytest.approx(float(mpmath.bessely(0, 1)), abs=1e-10)
    assert bessel_y0(1.0) == pytest.approx(0.0882569642, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1e-3, max_value=80.0))
def test_bessel_against_mpmath(x):
    j0, dj0, y0, dy0 = bessel_j0_y0_with_derivatives(x)
    assert j0 == pytest.approx(float(mpmath.besselj(0, x)), abs=1e-11)
    assert y0 == pytest.approx(float(mpmath.bessely(0, x)), abs=1e-10 * max(1.0, abs(math.log(x))))
    assert dj0 == pytest.approx(-float(mpmath.besselj(1, x)), abs=1e-11)
    assert dy0 == pytest.approx(-float(mpmath.bessely(1, x)), abs=1e-10 / min(1.0, x))


def test_bessel_vectorised_matches_scalar():
    xs = np.array([0.3, 2.0, 24.9, 25.1, 60.0])
    vec = bessel_j0(xs)
    assert np.allclose(vec, [bessel_j0(x) for x in xs], rtol=0, atol=1e-15)


def test_wronskian_identity():
    xs = np.linspace(0.1, 50.0, 300)
    j0, dj0, y0, dy0 = bessel_j0_y0_with_derivatives(xs)
    assert np.max(np.abs(xs * (j0 * dy0 - dj0 * y0) - 2.0 / math.pi)) < 1e-10


def test_domain_errors():
    with pytest.raises(DomainError):
        bessel_y0(0.0)
    with pytest.raises(DomainError):
        bessel_j0(-1.0)
    with pytest.raises(DomainError):
        hyper_u_coefficients(-1, 1)


def test_u_trivial_cases():
    assert hyper_u_neg_int(0, 2.5, 3.0) == 1
    for z in (0.0, 0.7, 4.0):
        assert hyper_u_neg_int(1, 1, z) == pytest.approx(z - 1.0)


def _u_recurrence(m, b, z):
    """U(-m, b, z) from U(a-1) = (2a - b + z) U(a) - a(a - b + 1) U(a+1) with a = -k."""
    prev, cur = 1.0, z - b          # m = 0, 1
    if m == 0:
        return prev
    for k in range(1, m):
        a = -k
        prev, cur = cur, (2 * a - b + z) * cur - a * (a - b + 1) * prev
    return cur


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 7), st.integers(-6, 6), st.floats(0.0, 10.0))
def test_u_matches_recurrence(m, b, z):
    assert hyper_u_neg_int(m, b, z) == pytest.approx(_u_recurrence(m, b, z), rel=1e-10, abs=1e-8)


@pytest.mark.parametrize("m,b,z", [(2, 0.5, 1.3), (3, 2.0, 0.4), (4, 1.5, 6.0)])
def test_u_against_mpmath(m, b, z):
    assert hyper_u_neg_int(m, b, z) == pytest.approx(float(mpmath.hyperu(-m, b, z)), rel=1e-12)
