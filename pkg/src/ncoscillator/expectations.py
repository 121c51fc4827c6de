"""Matrix elements, variances and generalized uncertainty relations.

The noncommutative variables are Bopp shifts of the canonical ones,

    X = x - theta/(2 hbar) p_y,   Y = y + theta/(2 hbar) p_x,
    P_x = p_x + Omega/(2 hbar) y, P_y = p_y - Omega/(2 hbar) x,

so all their variances follow from the canonical variances and the two
covariances <x p_y>, <y p_x>.  :func:`assemble_record` does that for any state.
"""

import cmath
import math
from dataclasses import asdict, dataclass, fields

import mpmath

from .optimize import golden_section

KINDS = ("x", "y", "px", "py", "x2", "y2", "px2", "py2", "xpy", "ypx")
SELF_ADJOINT = ("x", "y", "px", "py", "x2", "y2", "px2", "py2", "xpy", "ypx")


@dataclass(frozen=True)
class ChiValues:
    chi_plus: complex
    chi_minus: complex

    @classmethod
    def from_sigma(cls, sigma, dsigma, a):
        return cls(complex(1.0 / sigma, dsigma / a), complex(1.0 / sigma, -dsigma / a))

    @property
    def modulus2(self):
        return (self.chi_plus * self.chi_minus).real


def mu_helper(x, y):
    """mu(x, y) = sqrt((x/2 + 1)(y - 1))."""
    return math.sqrt((x / 2.0 + 1.0) * (y - 1.0))


@dataclass(frozen=True)
class Instant:
    """sigma (rescaled to tau = 1), sigma', a and the two fields at time t."""

    t: float
    sigma: float
    dsigma: float
    a: float
    theta: float
    omega: float
    hbar: float

    @property
    def velocity(self):
        return self.dsigma / self.a

    @property
    def chi2(self):
        return 1.0 / self.sigma**2 + self.velocity**2


def instant(t, ep, bg):
    t = float(t)
    ep.check_time(t)
    bg.check_time(t)
    s, ds = ep(t)
    scale = bg.constants.tau ** -0.25
    theta, om = bg.fields(t)
    return Instant(t, float(s) * scale, float(ds) * scale, float(bg.a(t)), float(theta),
                   float(om), bg.constants.hbar)


def matrix_element(kind, n, m, m_prime, t, ep, bg, phase=None):
    """<n, m-n| O |n, m'-n> for O in :data:`KINDS`.

    ``phase`` (a :class:`~ncoscillator.states.PhaseIntegral`) supplies
    alpha_{0,1} = Lambda(t) and alpha_{0,2} = 2 Lambda(t); without it both
    phases are zero, which corresponds to undressed eigenfunctions.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown matrix element kind {kind!r}")
    ins = instant(t, ep, bg)
    lam = phase.lambda_of_t(t) if phase is not None else 0.0
    e1 = cmath.exp(1j * lam)
    e2 = cmath.exp(2j * lam)
    h, s = ins.hbar, ins.sigma
    chi = ChiValues.from_sigma(s, ins.dsigma, ins.a)
    cp, cm = chi.chi_plus, chi.chi_minus
    up1 = m_prime == m + 1
    dn1 = m == m_prime + 1
    up2 = m_prime == m + 2
    dn2 = m == m_prime + 2
    diag = m == m_prime
    rh = math.sqrt(h)
    r2 = 2.0 * math.sqrt(2.0)

    if kind in ("x", "y", "px", "py"):
        fwd = math.sqrt(m_prime) * e1 if up1 else 0.0
        bwd = math.sqrt(m) / e1 if dn1 else 0.0
        if kind == "x":
            return 1j * rh / 2.0 * s * (fwd - bwd)
        if kind == "y":
            return -rh / 2.0 * s * (fwd + bwd)
        if kind == "px":
            return rh / 2.0 * (cp * fwd + cm * bwd)
        return 1j * rh / 2.0 * (cp * fwd - cm * bwd)

    fwd = mu_helper(m, m_prime) * e2 if up2 else 0.0
    bwd = mu_helper(m_prime, m) / e2 if dn2 else 0.0
    nm = n + m + 1
    if kind in ("x2", "y2"):
        sign = -1.0 if kind == "x2" else 1.0
        d = h / 2.0 * nm * s * s if diag else 0.0
        return d + sign * h * s * s / r2 * (fwd + bwd)
    if kind in ("px2", "py2"):
        sign = 1.0 if kind == "px2" else -1.0
        d = h / 2.0 * nm * (cp * cm) if diag else 0.0
        return d + sign * h / r2 * (cp * cp * fwd + cm * cm * bwd)
    d = 0.0
    if diag:
        d = h / 2.0 * (m - n) if kind == "xpy" else h / 2.0 * (n - m)
    return d - h * s / r2 * (cp * fwd + cm * bwd)


@dataclass(frozen=True)
class UncertaintyRecord:
    t: float
    theta: float
    omega: float
    var_x: float
    var_y: float
    var_px: float
    var_py: float
    cov_xpy: float
    cov_ypx: float
    var_X: float
    var_Y: float
    var_PX: float
    var_PY: float
    prod_xpx: float
    prod_XY: float
    prod_PxPy: float
    prod_XPx: float
    bound_XY: float
    bound_PP: float
    bound_XP: float

    def as_dict(self):
        return asdict(self)

    @staticmethod
    def columns():
        return [f.name for f in fields(UncertaintyRecord)]

    def violations(self, slack=1e-12):
        """Names of the generalized relations that fail (|theta|, |Omega| bounds)."""
        out = []
        if self.prod_XY < self.bound_XY - slack:
            out.append("XY")
        if self.prod_PxPy < self.bound_PP - slack:
            out.append("PxPy")
        if self.prod_XPx < abs(self.bound_XP) - slack:
            out.append("XPx")
        return out


def assemble_record(ins, var_x, var_y, var_px, var_py, cov_xpy, cov_ypx):
    """Bopp-shifted variances, products and bounds from canonical moments."""
    h, th, om = ins.hbar, ins.theta, ins.omega
    kt = th / (2.0 * h)
    ko = om / (2.0 * h)
    var_X = var_x + kt * kt * var_py - (th / h) * cov_xpy
    var_Y = var_y + kt * kt * var_px + (th / h) * cov_ypx
    var_PX = var_px + ko * ko * var_y + (om / h) * cov_ypx
    var_PY = var_py + ko * ko * var_x - (om / h) * cov_xpy
    return UncertaintyRecord(
        t=ins.t, theta=th, omega=om,
        var_x=var_x, var_y=var_y, var_px=var_px, var_py=var_py,
        cov_xpy=cov_xpy, cov_ypx=cov_ypx,
        var_X=var_X, var_Y=var_Y, var_PX=var_PX, var_PY=var_PY,
        prod_xpx=math.sqrt(var_x * var_px),
        prod_XY=math.sqrt(var_X * var_Y),
        prod_PxPy=math.sqrt(var_PX * var_PY),
        prod_XPx=math.sqrt(var_X * var_PX),
        bound_XY=abs(th) / 2.0, bound_PP=abs(om) / 2.0,
        bound_XP=h / 2.0 + th * om / (8.0 * h),
    )


def gaussian_record(ins, x_factor, y_factor, px_factor, py_factor, cov_xpy, cov_ypx):
    """Record whose canonical variances are (hbar/2) sigma^2 * factor and
    (hbar/2) * factor for momenta; shared by eigen-, Glauber and squeezed states
    so that equal inputs give bitwise-equal records."""
    h, s2 = ins.hbar, ins.sigma * ins.sigma
    return assemble_record(
        ins,
        0.5 * h * s2 * x_factor,
        0.5 * h * s2 * y_factor,
        0.5 * h * px_factor,
        0.5 * h * py_factor,
        cov_xpy, cov_ypx)


def eigenstate_uncertainties(n, m, t, ep, bg):
    ins = instant(t, ep, bg)
    nm = float(n + m + 1)
    chi2 = ins.chi2
    return gaussian_record(ins, nm, nm, chi2 * nm, chi2 * nm,
                           0.5 * ins.hbar * (m - n), 0.5 * ins.hbar * (n - m))


# -- theta_min analysis ----------------------------------------------------------


def f_theta(theta, ins):
    """Delta X Delta Y of psi_{0,0} minus theta/2 as a function of theta."""
    return ins.hbar * ins.sigma**2 / 2.0 + ins.chi2 * theta * theta / (8.0 * ins.hbar) - theta / 2.0


@dataclass(frozen=True)
class ThetaMin:
    theta_min: float
    f_min: float


def theta_min_analysis(t, ep, bg):
    """theta_min = 2 hbar sigma^2 a^2 / (a^2 + sigma^2 sigma'^2) and
    f[theta_min] = hbar sigma^4 sigma'^2 / (2 a^2 + 2 sigma^2 sigma'^2)."""
    ins = instant(t, ep, bg)
    s2, ds2, a2, h = ins.sigma**2, ins.dsigma**2, ins.a**2, ins.hbar
    theta_min = 2.0 * h * s2 * a2 / (a2 + s2 * ds2)
    f_min = h * s2 * s2 * ds2 / (2.0 * a2 + 2.0 * s2 * ds2)
    if f_min < 0:
        raise ArithmeticError(f"f[theta_min] = {f_min} is negative")
    return ThetaMin(theta_min, f_min)


def theta_min_numeric(t, ep, bg, tol=1e-12, dps=30):
    """Golden-section minimizer of f[theta] on [0, 4 hbar sigma^2].

    f is evaluated in ``dps``-digit arithmetic: in doubles the flat bottom of
    a quadratic limits any comparison-based search to about sqrt(eps).
    """
    ins = instant(t, ep, bg)
    with mpmath.workdps(dps):
        wide = Instant(ins.t, mpmath.mpf(ins.sigma), mpmath.mpf(ins.dsigma), mpmath.mpf(ins.a),
                       ins.theta, ins.omega, mpmath.mpf(ins.hbar))
        hi = 4 * wide.hbar * wide.sigma**2
        res = golden_section(lambda th: f_theta(th, wide), mpmath.mpf(0), hi, tol=tol)
        return float(res.x), float(res.fun)
