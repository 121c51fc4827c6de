"""Solutions of the dissipative Ermakov-Pinney equation

    sigma'' - (a'/a) sigma' + a b sigma = tau a^2 / sigma^3.

Closed forms come from the Chiellini-integrable families (exponential and
rational backgrounds) and from Pinney's superposition of two solutions of the
linear equation u'' + a b u = 0 when a is constant.  Everything else is
integrated numerically with an explicit 8th-order Runge-Kutta method.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .background import Constant, Exponential, PhysicalConstants, Rational
from .errors import ConstraintError, DegeneracyError, DomainError, SingularityError
from .special_fn import bessel_j0_y0_with_derivatives

CHIELLINI_EXPONENTIAL = "chiellini_exponential"
CHIELLINI_RATIONAL = "chiellini_rational"
PINNEY = "pinney_superposition"
NUMERIC = "numeric"

RESIDUAL_TOLERANCE = {
    CHIELLINI_EXPONENTIAL: 1e-10,
    CHIELLINI_RATIONAL: 1e-10,
    PINNEY: 1e-10,
    NUMERIC: 1e-6,
}

SIGMA_FLOOR = 1e-8
# sigma(0) = mu and sigma'(0) = -gamma mu / 2 of the exponential family with
# alpha = 5, beta = 2, gamma = 2, tau = 1.
DEFAULT_SIGMA0 = math.sqrt(5.0 / 3.0)
DEFAULT_DSIGMA0 = -math.sqrt(5.0 / 3.0)


@dataclass(frozen=True, eq=False)
class EPSolution:
    """sigma(t) and its derivatives on ``validity``.

    ``evaluator(t)`` returns (sigma, sigma', sigma'') for scalar or array t.
    For numeric solutions ``grid`` holds the (t, sigma, sigma') samples the
    interpolant was built from.
    """

    kind: str
    params: dict
    validity: tuple
    evaluator: object = field(repr=False)
    grid: tuple = field(default=None, repr=False)

    def check_time(self, t):
        t_arr = np.asarray(t, dtype=float)
        t0, t1 = self.validity
        slack = 1e-12 * max(1.0, abs(t0), abs(t1) if math.isfinite(t1) else 1.0)
        if np.any(t_arr < t0 - slack) or np.any(t_arr > t1 + slack):
            raise DomainError(f"t outside EP validity [{t0:.12g}, {t1:.12g}]")

    def evaluate(self, t):
        self.check_time(t)
        return self.evaluator(t)

    def __call__(self, t):
        s, ds, _ = self.evaluate(t)
        return s, ds

    def sigma(self, t):
        return self.evaluate(t)[0]

    def dsigma(self, t):
        return self.evaluate(t)[1]

    def ddsigma(self, t):
        return self.evaluate(t)[2]

    @property
    def tolerance(self):
        return RESIDUAL_TOLERANCE[self.kind]

    def probe_times(self, count=200, interior=False):
        """Uniform probe times on the validity interval.

        Open-ended or singular right ends must be handled by the caller;
        ``interior`` drops both endpoints.
        """
        t0, t1 = self.validity
        if not math.isfinite(t1):
            raise DomainError("validity interval is unbounded; pass explicit times")
        if interior:
            return np.linspace(t0, t1, count + 2)[1:-1]
        return np.linspace(t0, t1, count)


def ep_rhs(t, sigma, dsigma, a_family, b_family, tau):
    """sigma'' as dictated by the EP equation."""
    a = a_family(t)
    return a_family.deriv(t) / a * dsigma - a * b_family(t) * sigma + tau * a * a / sigma**3


def ep_residual(sol, a_family, b_family, constants, t):
    """|sigma'' - (a'/a) sigma' + a b sigma - tau a^2 / sigma^3| at ``t``.

    Numeric solutions store sigma'' from the equation's right-hand side at
    the interpolated state, so their residual is zero up to round-off; use
    :func:`derivative_defect` to probe the interpolant itself.
    """
    s, ds, dds = sol.evaluate(t)
    a = a_family(t)
    res = dds - a_family.deriv(t) / a * ds + a * b_family(t) * s - constants.tau * a * a / s**3
    return np.abs(res)


def max_residual(sol, a_family, b_family, constants, t):
    return float(np.max(ep_residual(sol, a_family, b_family, constants, t)))


# -- Chiellini machinery -------------------------------------------------------


@dataclass(frozen=True)
class ChielliniCheck:
    kappa: float
    residual: float
    integrable: bool


def chiellini_lambdas(kappa):
    """The two roots lambda_kappa^(+/-) = (-1 +/- sqrt(1 - 4 kappa)) / (2 kappa)."""
    root = math.sqrt(1.0 - 4.0 * kappa)
    return (-1.0 + root) / (2.0 * kappa), (-1.0 - root) / (2.0 * kappa)


def _ddx(f, x):
    h = 1e-3 * max(1.0, abs(x))
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def check_chiellini(g_family, h_family, probe_grid, tol=1e-8):
    """Test (d/dsigma)(h/g) = kappa g for a constant kappa over ``probe_grid``.

    ``g_family`` and ``h_family`` are functions of sigma.  The pointwise kappa
    is returned as its mean, with ``residual`` the spread across the grid.
    """
    probe = np.asarray(probe_grid, dtype=float)
    ratio = lambda s: h_family(s) / g_family(s)  # noqa: E731
    kappas = np.array([_ddx(ratio, s) / g_family(s) for s in probe])
    scale = max(1.0, float(np.max(np.abs(kappas))))
    spread = float(np.max(kappas) - np.min(kappas))
    return ChielliniCheck(float(np.mean(kappas)), spread, spread <= tol * scale)


def chiellini_exponential(alpha, beta, gamma, constants=None):
    """a = alpha e^{-gamma t}, b = beta e^{gamma t}, sigma = mu e^{-gamma t/2}.

    kappa = 1/4 and mu^4 = tau alpha^2 / (alpha beta - gamma^2 / 4).
    """
    constants = constants or PhysicalConstants()
    kappa = 0.25
    gap = alpha * beta - kappa * gamma**2
    if not gap > 0:
        raise ConstraintError(f"alpha*beta - gamma^2/4 must be positive, got {gap:.6g}")
    mu = (constants.tau * alpha**2 / gap) ** 0.25
    a_family = Exponential(alpha, -gamma) if gamma != 0 else Constant(alpha)
    b_family = Exponential(beta, gamma) if gamma != 0 else Constant(beta)

    def evaluator(t):
        t = np.asarray(t, dtype=float)
        s = mu * np.exp(-0.5 * gamma * t)
        out = (s, -0.5 * gamma * s, 0.25 * gamma**2 * s)
        return tuple(float(v) for v in out) if t.ndim == 0 else out

    t_stop = math.inf
    if gamma > 0 and constants.m * alpha > 1:
        t_stop = math.log(constants.m * alpha) / gamma
    params = {"alpha": alpha, "beta": beta, "gamma": gamma, "mu": mu, "kappa": kappa,
              "tau": constants.tau}
    return a_family, b_family, EPSolution(CHIELLINI_EXPONENTIAL, params, (0.0, t_stop), evaluator)


def rational_gamma(n, alpha, beta, tau=1.0):
    """gamma solving gamma^2 = (n+1)(alpha beta - tau alpha^2) / kappa."""
    kappa = (n + 1) / (n + 2) ** 2
    rhs = (n + 1) * (alpha * beta - tau * alpha**2) / kappa
    if not rhs > 0:
        raise ConstraintError(f"alpha*beta must exceed tau*alpha^2 (got rhs {rhs:.6g})")
    return math.sqrt(rhs)


def chiellini_rational(n, alpha, beta, mu, gamma=None, constants=None):
    """Rational Chiellini family with g(sigma) = gamma sigma^n.

    With s = mu - gamma t > 0 (so t < t_c = mu / gamma):

        a     = alpha ((n+2)/n)^((n+2)/n) s^(-(n+2)/n)
        b     = beta (n/(n+2))^(2/n - 1) s^(2/n - 1)
        sigma = ((n+2)/n)^(1/n) s^(-1/n)

    kappa = (n+1)/(n+2)^2 and gamma^2 = (n+1)(alpha beta - tau alpha^2)/kappa;
    ``gamma`` is computed when omitted and verified when given.
    """
    constants = constants or PhysicalConstants()
    if int(n) != n or n < 1:
        raise ConstraintError("n must be a positive integer")
    n = int(n)
    kappa = (n + 1) / (n + 2) ** 2
    required = rational_gamma(n, alpha, beta, constants.tau)
    if gamma is None:
        gamma = required
    elif abs(gamma**2 - required**2) > 1e-10 * max(1.0, required**2):
        raise ConstraintError(
            f"gamma^2={gamma**2:.12g} violates (n+1)(alpha beta - tau alpha^2)/kappa={required**2:.12g}")
    if not (gamma > 0 and mu > 0):
        raise ConstraintError("rational family needs gamma > 0 and mu > 0")
    q = (n + 2) / n
    a_family = Rational(alpha * q**q, gamma, mu, -q)
    b_family = Rational(beta * (n / (n + 2)) ** (2.0 / n - 1.0), gamma, mu, 2.0 / n - 1.0)
    amp = q ** (1.0 / n)

    def evaluator(t):
        t = np.asarray(t, dtype=float)
        s = mu - gamma * t
        if np.any(s <= 0):
            raise DomainError(f"rational solution requires t < {mu / gamma:.12g}")
        p = -1.0 / n
        sig = amp * s**p
        ds = -gamma * p * amp * s ** (p - 1)
        dds = gamma**2 * p * (p - 1) * amp * s ** (p - 2)
        out = (sig, ds, dds)
        return tuple(float(v) for v in out) if t.ndim == 0 else out

    params = {"n": n, "alpha": alpha, "beta": beta, "gamma": gamma, "mu": mu, "kappa": kappa,
              "tau": constants.tau}
    return a_family, b_family, EPSolution(CHIELLINI_RATIONAL, params, (0.0, mu / gamma), evaluator)


# -- Pinney superposition ------------------------------------------------------


def _pinney_from_u(u1, du1, u2, du2, wronskian, a_const, ab, tau):
    k = tau * a_const**2 / wronskian**2
    sig2 = u1 * u1 + k * u2 * u2
    sig = np.sqrt(sig2)
    ds = (u1 * du1 + k * u2 * du2) / sig
    # u'' = -a b u for both solutions
    dds = (du1 * du1 + k * du2 * du2 - ab * sig2 - ds * ds) / sig
    return sig, ds, dds


def pinney_superposition(b_family, a_const, c1=1.0, constants=None, t_span=(0.0, 10.0),
                         method="auto", u_init=None, rtol=1e-12):
    """sigma = sqrt(u1^2 + tau a^2 u2^2 / W^2) for constant a.

    For ``b_family`` of the form beta e^{gamma t} the Bessel closed form is
    used (u1 = c1 J0(xi), u2 = Y0(xi), xi = 2 sqrt(a beta) e^{gamma t/2}/gamma).
    Otherwise u1, u2 are integrated from ``u_init`` = ((u1, u1'), (u2, u2'))
    at t_span[0], defaulting to ((c1, 0), (0, 1)).
    """
    constants = constants or PhysicalConstants()
    tau = constants.tau
    t0, t1 = float(t_span[0]), float(t_span[1])
    use_bessel = method == "bessel" or (
        method == "auto" and u_init is None and isinstance(b_family, Exponential)
        and b_family.rate != 0)

    if use_bessel:
        if not isinstance(b_family, Exponential):
            raise ValueError("Bessel form needs an exponential b(t)")
        beta, gamma = b_family.amplitude, b_family.rate
        if not (beta > 0 and a_const > 0):
            raise DomainError("Bessel form needs a > 0 and beta > 0")
        wronskian = c1 * gamma / math.pi
        if abs(wronskian) < 1e-300 or c1 == 0:
            raise DegeneracyError("vanishing Wronskian (c1 = 0)")
        xi0 = 2.0 * math.sqrt(a_const * beta) / abs(gamma)

        def evaluator(t):
            t = np.asarray(t, dtype=float)
            xi = xi0 * np.exp(0.5 * gamma * t)
            dxi = 0.5 * gamma * xi
            j0, dj0, y0, dy0 = bessel_j0_y0_with_derivatives(xi)
            ab = a_const * b_family(t)
            out = _pinney_from_u(c1 * j0, c1 * dj0 * dxi, y0, dy0 * dxi, wronskian, a_const, ab, tau)
            return tuple(float(v) for v in out) if t.ndim == 0 else out

        params = {"a": a_const, "beta": beta, "gamma": gamma, "c1": c1, "tau": tau,
                  "wronskian": wronskian, "form": "bessel"}
        return EPSolution(PINNEY, params, (t0, t1), evaluator)

    if u_init is None:
        u_init = ((c1, 0.0), (0.0, 1.0))
    (u10, du10), (u20, du20) = u_init
    wronskian = u10 * du20 - du10 * u20
    if abs(wronskian) < 1e-14 * max(1.0, abs(u10 * du20), abs(du10 * u20)):
        raise DegeneracyError(f"Wronskian {wronskian:.3e} too small for independent solutions")

    def rhs(t, y):
        w = -a_const * b_family(t)
        return [y[1], w * y[0], y[3], w * y[2]]

    ivp = solve_ivp(rhs, (t0, t1), [u10, du10, u20, du20], method="DOP853",
                    rtol=rtol, atol=rtol * 1e-2, dense_output=True)
    if not ivp.success:
        raise SingularityError(f"linear solve failed: {ivp.message}", float(ivp.t[-1]))
    dense = ivp.sol

    def evaluator(t):
        t = np.asarray(t, dtype=float)
        y = dense(t)
        ab = a_const * b_family(t)
        out = _pinney_from_u(y[0], y[1], y[2], y[3], wronskian, a_const, ab, tau)
        return tuple(float(v) for v in out) if t.ndim == 0 else out

    params = {"a": a_const, "c1": c1, "tau": tau, "wronskian": wronskian, "form": "numeric",
              "u_init": [list(u_init[0]), list(u_init[1])]}
    return EPSolution(PINNEY, params, (t0, t1), evaluator)


def linear_pair(sol, b_family, t):
    """(u1, u1', u2, u2') of a Pinney solution at ``t`` (Bessel form only)."""
    p = sol.params
    xi0 = 2.0 * math.sqrt(p["a"] * p["beta"]) / abs(p["gamma"])
    xi = xi0 * np.exp(0.5 * p["gamma"] * np.asarray(t, dtype=float))
    dxi = 0.5 * p["gamma"] * xi
    j0, dj0, y0, dy0 = bessel_j0_y0_with_derivatives(xi)
    return p["c1"] * j0, p["c1"] * dj0 * dxi, y0, dy0 * dxi


# -- numerical integration -----------------------------------------------------


def integrate_ep(a_family, b_family, sigma0=DEFAULT_SIGMA0, dsigma0=DEFAULT_DSIGMA0,
                 constants=None, t_grid=None, rtol=1e-10):
    """Integrate the EP equation over ``[t_grid[0], t_grid[-1]]``.

    sigma and sigma' come from the solver's dense output; sigma'' is the right
    hand side of the equation evaluated at those interpolated states.
    """
    constants = constants or PhysicalConstants()
    tau = constants.tau
    if not sigma0 > 0:
        raise DomainError("sigma0 must be positive")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0):
        raise DomainError("t_grid must be strictly increasing with at least two points")
    t0, t1 = float(t_grid[0]), float(t_grid[-1])
    if np.any(a_family(t_grid) <= 0):
        raise SingularityError("a(t) is not positive on the grid", t0)

    def rhs(t, y):
        return [y[1], ep_rhs(t, y[0], y[1], a_family, b_family, tau)]

    def sigma_floor(t, y):
        return y[0] - SIGMA_FLOOR

    def a_zero(t, y):
        return a_family(t)

    sigma_floor.terminal = True
    a_zero.terminal = True

    ivp = solve_ivp(rhs, (t0, t1), [sigma0, dsigma0], method="DOP853", rtol=rtol,
                    atol=rtol * 1e-2, dense_output=True, events=(sigma_floor, a_zero))
    if ivp.status == 1:
        if ivp.t_events[0].size:
            raise SingularityError("sigma approached 0", float(ivp.t_events[0][0]))
        raise SingularityError("a(t) crossed 0", float(ivp.t_events[1][0]))
    if not ivp.success:
        raise SingularityError(f"integration failed: {ivp.message}", float(ivp.t[-1]))
    dense = ivp.sol

    def evaluator(t):
        t = np.asarray(t, dtype=float)
        y = dense(t)
        out = (y[0], y[1], ep_rhs(t, y[0], y[1], a_family, b_family, tau))
        return tuple(float(v) for v in out) if t.ndim == 0 else out

    ys = dense(t_grid)
    params = {"sigma0": sigma0, "dsigma0": dsigma0, "rtol": rtol, "tau": tau,
              "steps": int(ivp.t.size - 1)}
    return EPSolution(NUMERIC, params, (t0, t1), evaluator, grid=(t_grid, ys[0], ys[1]))


def derivative_defect(sol, a_family, b_family, constants, t, h=None):
    """|d sigma'/dt - sigma''| with d/dt taken by a centred difference.

    A diagnostic for numeric solutions, whose stored sigma'' comes from the
    equation itself and therefore has zero residual by construction.
    """
    t = np.asarray(t, dtype=float)
    t0, t1 = sol.validity
    if h is None:
        h = 1e-4 * max(1.0, t1 - t0)
    lo = np.clip(t - h, t0, t1)
    hi = np.clip(t + h, t0, t1)
    slope = (sol.dsigma(hi) - sol.dsigma(lo)) / (hi - lo)
    return np.abs(slope - sol.ddsigma(t))


def write_ep_csv(path, sol, a_family, b_family, constants, times, fmt="%.12g"):
    """CSV with columns t, sigma, dsigma, residual."""
    times = np.asarray(times, dtype=float)
    s, ds, _ = sol.evaluate(times)
    res = ep_residual(sol, a_family, b_family, constants, times)
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "sigma", "dsigma", "residual"])
        for row in zip(times, s, ds, res):
            writer.writerow([fmt % v for v in row])
