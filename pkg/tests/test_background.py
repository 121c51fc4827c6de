import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncoscillator.background import (BackgroundSpec, Constant, Exponential, PhysicalConstants, Rational,
                                     Sinusoidal, coefficients, cutoff_time, invert_background)
from ncoscillator.errors import DomainError


def test_default_constants_are_unity():
    k = PhysicalConstants()
    assert (k.m, k.hbar, k.omega, k.tau) == (1.0, 1.0, 1.0, 1.0)


@pytest.mark.parametrize("field", ["m", "hbar", "omega", "tau"])
def test_constants_must_be_positive(field):
    with pytest.raises(DomainError):
        PhysicalConstants(**{field: 0.0})


def test_vanishing_background():
    bg = BackgroundSpec.theta_omega(Constant(0.0), Constant(0.0))
    for t in (0.0, 1.7, 9.0):
        c = coefficients(bg, t)
        assert (c.a, c.b, c.c) == (1.0, 1.0, 0.0)


def test_exponential_background_at_zero():
    bg = BackgroundSpec.theta_omega(Exponential(5.0, -2.0), Exponential(2.0, 2.0))
    c = coefficients(bg, 0.0)
    # 1 + 25/4, 1 + 4/4 and 5/2 + 2/2 by hand
    assert c.a == pytest.approx(7.25, abs=1e-14)
    assert c.b == pytest.approx(2.0, abs=1e-14)
    assert c.c == pytest.approx(3.5, abs=1e-14)


def test_sinusoidal_background_at_pi():
    bg = BackgroundSpec.theta_omega(Sinusoidal(5.0, 2.0), Sinusoidal(2.0, 1.0))
    c = coefficients(bg, math.pi)
    assert c.a == pytest.approx(1.0, abs=1e-14)
    assert c.b == pytest.approx(1.0, abs=1e-14)
    assert c.c == pytest.approx(0.0, abs=1e-14)


def test_inverse_map_examples():
    k = PhysicalConstants()
    assert invert_background(1.0, 1.0, k) == (0.0, 0.0)
    theta, om = invert_background(7.25, 2.0, k)
    assert theta == pytest.approx(5.0, abs=1e-13)
    assert om == pytest.approx(2.0, abs=1e-13)
    with pytest.raises(DomainError):
        invert_background(0.5, 2.0, k)
    with pytest.raises(DomainError):
        invert_background(2.0, 0.5, k)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 50.0), st.floats(0.0, 50.0), st.floats(0.2, 5.0), st.floats(0.2, 5.0),
       st.floats(0.2, 5.0))
def test_round_trip(theta, om, m, hbar, omega):
    k = PhysicalConstants(m, hbar, omega, 1.0)
    bg = BackgroundSpec.theta_omega(Constant(theta), Constant(om), k)
    c = coefficients(bg, 0.0)
    assert c.a >= 1.0 / m and c.b >= m * omega**2
    back = invert_background(c.a, c.b, k)
    assert back[0] == pytest.approx(theta, rel=1e-7, abs=1e-6)
    assert back[1] == pytest.approx(om, rel=1e-7, abs=1e-6)


def test_direct_ab_recovers_c():
    k = PhysicalConstants()
    ref = BackgroundSpec.theta_omega(Exponential(5.0, -2.0), Exponential(2.0, 2.0), k)
    direct = BackgroundSpec.direct_ab(ref.a_family, ref.b_family, k)
    for t in (0.0, 0.3, 1.1):
        assert coefficients(direct, t).c == pytest.approx(coefficients(ref, t).c, rel=1e-12)


def test_cutoff_exponential():
    bg = BackgroundSpec.direct_ab(Exponential(5.0, -2.0), Exponential(2.0, 2.0))
    tc = cutoff_time(bg)
    assert tc == pytest.approx(math.log(5.0) / 2.0, abs=1e-15)
    assert tc == pytest.approx(0.8047, abs=1e-4)
    assert bg.a(tc) == pytest.approx(1.0, abs=1e-14)
    assert bg.validity[1] == tc


def test_cutoff_rational_and_theta_omega():
    bg = BackgroundSpec.direct_ab(Rational(3.0, 2.0, 3.0, -1.0), Constant(2.0))
    assert cutoff_time(bg) == 1.5
    assert cutoff_time(BackgroundSpec.theta_omega(Constant(1.0), Constant(1.0))) is None


def test_direct_ab_below_threshold_raises():
    bg = BackgroundSpec.direct_ab(Constant(0.5), Constant(2.0))
    with pytest.raises(DomainError):
        coefficients(bg, 0.0)


def test_time_outside_validity():
    bg = BackgroundSpec.direct_ab(Exponential(5.0, -2.0), Exponential(2.0, 2.0))
    with pytest.raises(DomainError):
        coefficients(bg, 1.0)


@pytest.mark.parametrize("fam", [Exponential(1.3, -0.7), Sinusoidal(2.0, 1.5), Rational(1.5, 2.0, 3.0, -1.5)])
def test_family_derivatives(fam):
    t, h = 0.4, 1e-4
    num1 = (fam(t + h) - fam(t - h)) / (2 * h)
    num2 = (fam(t + h) - 2 * fam(t) + fam(t - h)) / h**2
    assert fam.deriv(t) == pytest.approx(num1, rel=1e-7)
    assert fam.deriv2(t) == pytest.approx(num2, rel=1e-5)


def test_derived_a_derivatives():
    bg = BackgroundSpec.theta_omega(Sinusoidal(5.0, 2.0), Sinusoidal(2.0, 1.0))
    a = bg.a_family
    ts = np.linspace(0.1, 3.0, 7)
    h = 1e-5
    assert np.allclose(a.deriv(ts), (a(ts + h) - a(ts - h)) / (2 * h), rtol=1e-7)
