import math

import numpy as np
import pytest

from ncoscillator.background import BackgroundSpec, Constant, Exponential, Sinusoidal
from ncoscillator.ep import NUMERIC, EPSolution, chiellini_exponential, integrate_ep

MU = math.sqrt(5.0 / 3.0)


def frozen_ep(sigma, dsigma, t_span=(0.0, 10.0)):
    """An EPSolution that is constant in time; only useful at single instants."""

    def evaluator(t):
        t = np.asarray(t, dtype=float)
        if t.ndim == 0:
            return float(sigma), float(dsigma), 0.0
        return np.full(t.shape, sigma), np.full(t.shape, dsigma), np.zeros(t.shape)

    return EPSolution(NUMERIC, {"frozen": True}, t_span, evaluator)


@pytest.fixture(scope="session")
def exp_closed():
    a, b, sol = chiellini_exponential(5.0, 2.0, 2.0)
    return BackgroundSpec.direct_ab(a, b), sol


@pytest.fixture(scope="session")
def exp_numeric():
    bg = BackgroundSpec.theta_omega(Exponential(5.0, -2.0), Exponential(2.0, 2.0))
    sol = integrate_ep(bg.a_family, bg.b_family, MU, -MU, t_grid=np.linspace(0.0, 2.0, 200))
    return bg, sol


@pytest.fixture(scope="session")
def sinusoidal():
    bg = BackgroundSpec.theta_omega(Sinusoidal(5.0, 2.0), Sinusoidal(2.0, 1.0))
    sol = integrate_ep(bg.a_family, bg.b_family, MU, -MU, t_grid=np.linspace(0.0, 10.0, 400))
    return bg, sol


@pytest.fixture(scope="session")
def static():
    """a = b = tau = 1 with sigma = 1: the ordinary oscillator."""
    bg = BackgroundSpec.direct_ab(Constant(1.0), Constant(1.0))
    sol = integrate_ep(bg.a_family, bg.b_family, 1.0, 0.0, t_grid=np.linspace(0.0, 5.0, 50))
    return bg, sol
