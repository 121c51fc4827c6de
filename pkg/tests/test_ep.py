import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncoscillator.background import Constant, Exponential, PhysicalConstants
from ncoscillator.ep import (EPSolution, check_chiellini, chiellini_exponential, chiellini_lambdas,
                             chiellini_rational, derivative_defect, ep_residual, integrate_ep, linear_pair,
                             max_residual, pinney_superposition, rational_gamma, write_ep_csv)
from ncoscillator.errors import ConstraintError, DegeneracyError, DomainError, SingularityError

K = PhysicalConstants()


def test_exponential_mu_from_caption():
    _, _, sol = chiellini_exponential(5.0, 2.0, 2.0)
    assert sol.params["mu"] == pytest.approx(math.sqrt(5.0 / 3.0), abs=1e-14)
    assert sol.params["mu"] == pytest.approx((25.0 / 9.0) ** 0.25, abs=1e-14)
    assert sol.params["kappa"] == 0.25


def test_exponential_gamma_zero_is_static():
    a, b, sol = chiellini_exponential(1.0, 1.0, 0.0)
    assert sol.sigma(3.0) == pytest.approx(1.0, abs=1e-15)
    assert max_residual(sol, a, b, K, np.linspace(0, 5, 20)) < 1e-14


def test_exponential_residual_small():
    a, b, sol = chiellini_exponential(5.0, 2.0, 2.0)
    assert max_residual(sol, a, b, K, [0.0, 0.3, 0.6]) < 1e-12


def test_exponential_constraint():
    with pytest.raises(ConstraintError):
        chiellini_exponential(1.0, 1.0, 3.0)


def test_residual_detects_perturbation():
    a, b, sol = chiellini_exponential(5.0, 2.0, 2.0)

    def shifted(t):
        s, ds, dds = sol.evaluator(t)
        return s + 0.1, ds, dds

    bad = EPSolution(sol.kind, sol.params, sol.validity, shifted)
    assert max_residual(bad, a, b, K, [0.0, 0.3, 0.6]) > 0.01


def test_rational_n2_kappa():
    _, _, sol = chiellini_rational(2, 1.0, 2.0, 1.0)
    assert sol.params["kappa"] == pytest.approx(3.0 / 16.0, abs=1e-16)


def test_rational_gamma_n1():
    # kappa = 2/9, gamma^2 = 2 * (2 - 1) / (2/9) = 9
    assert rational_gamma(1, 1.0, 2.0) == pytest.approx(3.0, abs=1e-14)
    a, b, sol = chiellini_rational(1, 1.0, 2.0, 1.0, gamma=3.0)
    times = np.linspace(0.0, 0.95 * sol.validity[1], 50)
    assert max_residual(sol, a, b, K, times) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.floats(0.3, 2.0), st.floats(1.05, 3.0), st.floats(0.5, 3.0))
def test_rational_residual_property(n, alpha, ratio, mu):
    a, b, sol = chiellini_rational(n, alpha, alpha * ratio, mu)
    times = np.linspace(0.0, 0.9 * sol.validity[1], 50)
    res = ep_residual(sol, a, b, K, times)
    scale = np.abs(sol.ddsigma(times)) + np.abs(a(times) * b(times) * sol.sigma(times)) + 1.0
    assert np.max(res / scale) < 1e-10


def test_rational_rejects_bad_gamma_and_time():
    with pytest.raises(ConstraintError):
        chiellini_rational(1, 1.0, 2.0, 1.0, gamma=2.0)
    with pytest.raises(ConstraintError):
        chiellini_rational(1, 2.0, 1.0, 1.0)
    _, _, sol = chiellini_rational(1, 1.0, 2.0, 1.0)
    with pytest.raises(DomainError):
        sol.sigma(sol.validity[1] + 0.1)


def test_check_chiellini_exponential():
    # a = 3 sigma^2 and ab = 10 along the exponential family: h = (ab - tau A^2) sigma
    gamma = 2.0
    res = check_chiellini(lambda s: gamma, lambda s: (10.0 - 9.0) * s, np.linspace(0.5, 2.0, 20))
    assert res.integrable
    assert res.kappa == pytest.approx(0.25, abs=1e-10)


def test_check_chiellini_rational_and_failure():
    gamma, kappa = 1.7, 2.0 / 9.0
    res = check_chiellini(lambda s: gamma * s, lambda s: kappa * gamma**2 * s**3 / 2.0, np.linspace(0.5, 2.0, 20))
    assert res.integrable and res.kappa == pytest.approx(kappa, abs=1e-10)
    bad = check_chiellini(lambda s: 1.0, lambda s: s**3, np.linspace(0.5, 2.0, 20))
    assert not bad.integrable


def test_chiellini_lambdas_quarter():
    lp, lm = chiellini_lambdas(0.25)
    assert lp == lm == pytest.approx(-2.0)


def test_pinney_trivial():
    sol = pinney_superposition(Constant(1.0), 1.0, t_span=(0.0, 6.0))
    ts = np.linspace(0, 6, 40)
    assert np.max(np.abs(sol.sigma(ts) - 1.0)) < 1e-10


def test_pinney_bessel_against_numeric_linear_solve():
    b = Exponential(2.0, 1.0)
    closed = pinney_superposition(b, 1.5, c1=0.7, t_span=(0.0, 3.0))
    assert closed.params["form"] == "bessel"
    u1, du1, u2, du2 = linear_pair(closed, b, 0.0)
    num = pinney_superposition(b, 1.5, c1=0.7, t_span=(0.0, 3.0), method="numeric",
                               u_init=((u1, du1), (u2, du2)), rtol=1e-13)
    ts = np.linspace(0, 3, 200)
    assert np.max(np.abs(closed.sigma(ts) - num.sigma(ts))) < 1e-8
    assert max_residual(closed, Constant(1.5), b, K, ts) < 1e-9
    u1, du1, u2, du2 = linear_pair(closed, b, ts)
    w = u1 * du2 - du1 * u2
    assert np.ptp(w) < 1e-10


def test_pinney_degenerate():
    with pytest.raises(DegeneracyError):
        pinney_superposition(Constant(1.0), 1.0, u_init=((1.0, 0.0), (2.0, 0.0)))
    with pytest.raises(DegeneracyError):
        pinney_superposition(Exponential(2.0, 1.0), 1.0, c1=0.0)


def test_integrate_fixed_point():
    sol = integrate_ep(Constant(1.0), Constant(1.0), 1.0, 0.0, t_grid=np.linspace(0, 10, 50))
    assert np.max(np.abs(sol.sigma(np.linspace(0, 10, 300)) - 1.0)) < 1e-12


def test_integrate_matches_closed_form():
    a, b, closed = chiellini_exponential(5.0, 2.0, 2.0)
    mu = closed.params["mu"]
    t_end = 0.8 * closed.validity[1]
    num = integrate_ep(a, b, mu, -mu, t_grid=np.linspace(0, t_end, 100))
    ts = np.linspace(0, t_end, 500)
    assert np.max(np.abs(num.sigma(ts) - closed.sigma(ts))) < 1e-6
    assert np.max(np.abs(num.dsigma(ts) - closed.dsigma(ts))) < 1e-6


def test_sinusoidal_positive_and_oscillatory(sinusoidal):
    bg, sol = sinusoidal
    ts = np.linspace(0, 10, 2000)
    s = sol.sigma(ts)
    assert np.all(s > 0)
    ds = sol.dsigma(ts)
    assert np.count_nonzero(np.diff(np.sign(ds))) >= 4
    assert max_residual(sol, bg.a_family, bg.b_family, K, ts) < 1e-6
    inner = ts[1:-1]
    defect = derivative_defect(sol, bg.a_family, bg.b_family, K, inner, h=1e-5)
    assert np.max(defect / np.maximum(1.0, np.abs(sol.ddsigma(inner)))) < 1e-5


def test_integrate_rejects_bad_input():
    with pytest.raises(DomainError):
        integrate_ep(Constant(1.0), Constant(1.0), -1.0, 0.0, t_grid=[0.0, 1.0])
    with pytest.raises(DomainError):
        integrate_ep(Constant(1.0), Constant(1.0), 1.0, 0.0, t_grid=[1.0, 0.0])
    with pytest.raises(SingularityError):
        integrate_ep(Constant(-1.0), Constant(1.0), 1.0, 0.0, t_grid=[0.0, 1.0])


def test_validity_enforced(exp_closed):
    _, sol = exp_closed
    with pytest.raises(DomainError):
        sol.sigma(2.0)


def test_write_csv(tmp_path, exp_closed):
    bg, sol = exp_closed
    path = tmp_path / "ep.csv"
    write_ep_csv(path, sol, bg.a_family, bg.b_family, K, np.linspace(0, 0.5, 5))
    lines = path.read_bytes().split(b"\n")
    assert lines[0] == b"t,sigma,dsigma,residual"
    assert b"\r" not in path.read_bytes()
    assert len([ln for ln in lines if ln]) == 6
