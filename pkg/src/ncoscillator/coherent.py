"""Glauber, squeezed and Gaussian Klauder coherent states.

All three are built on the invariant's ladder operators at fixed n, so their
second moments reduce to closed forms in sigma, sigma'/a and the Bopp-shift
fields.  Squeezing uses S(beta) = exp(beta/2 (a^2 - a^dag^2)) with real beta.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .expectations import assemble_record, gaussian_record, instant, mu_helper
from .optimize import scan_then_golden

TARGETS = {"XPx": "prod_XPx", "XY": "prod_XY", "PxPy": "prod_PxPy", "xpx": "prod_xpx"}


@dataclass(frozen=True)
class Glauber:
    alpha: complex


@dataclass(frozen=True)
class Squeezed:
    alpha: complex
    beta: float

    def __post_init__(self):
        if not math.isfinite(self.beta):
            raise DomainError("squeezing parameter must be finite")


@dataclass(frozen=True)
class GaussianKlauder:
    n: int
    m0: float
    phi0: float
    s: float

    def __post_init__(self):
        if not self.s > 0:
            raise DomainError("Gaussian width s must be positive")
        if int(self.n) != self.n or self.n < 0:
            raise DomainError("n must be a nonnegative integer")
        if self.m0 < 0:
            raise DomainError("m0 must be nonnegative")


# -- Glauber -------------------------------------------------------------------


def glauber_uncertainties(alpha, t, ep, bg):
    """Variances of |alpha, t>: those of psi_{0,0}, whatever alpha is."""
    ins = instant(t, ep, bg)
    chi2 = ins.chi2
    one = 1.0
    return gaussian_record(ins, one, one, chi2 * one, chi2 * one, 0.5 * ins.hbar * 0, 0.5 * ins.hbar * 0)


def glauber_moments(alpha, t, ep, bg):
    """First and second moments of x, y, p_x, p_y in |alpha, t>."""
    ins = instant(t, ep, bg)
    h, s, v = ins.hbar, ins.sigma, ins.velocity
    re, im = complex(alpha).real, complex(alpha).imag
    rh = math.sqrt(h)
    x = -rh * s * im
    y = -rh * s * re
    px = rh * (re / s - v * im)
    py = -rh * (im / s + v * re)
    half_chi = 0.5 * h * ins.chi2
    return {
        "x": x, "y": y, "px": px, "py": py,
        "x2": h * s * s * (0.5 + im * im),
        "y2": h * s * s * (0.5 + re * re),
        "px2": half_chi + px * px,
        "py2": half_chi + py * py,
    }


# -- squeezed ------------------------------------------------------------------


def squeezed_uncertainties(alpha, beta, t, ep, bg):
    """Variances of S(beta) D(alpha)|0,0>; independent of alpha.

    x-type variances scale with e^{beta} cosh(beta) and y-type ones with
    e^{-beta} cosh(beta).  The covariances are <x p_y> = hbar/4 (e^{2 beta} - 1)
    and <y p_x> = hbar/4 (1 - e^{-2 beta}).
    """
    ins = instant(t, ep, bg)
    return _squeezed_record(ins, beta)


def _squeezed_record(ins, beta):
    ep_, em_ = math.exp(beta), math.exp(-beta)
    ch = math.cosh(beta)
    inv_s2 = 1.0 / ins.sigma**2
    v2 = ins.velocity**2
    # at beta = 0 every factor below is exactly 1.0, which reproduces the
    # Glauber record bit for bit
    h, s2 = ins.hbar, ins.sigma * ins.sigma
    var_x = 0.5 * h * s2 * (ep_ * ch)
    var_y = 0.5 * h * s2 * (em_ * ch)
    var_px = 0.5 * h * ((inv_s2 * em_ + v2 * ep_) * ch)
    var_py = 0.5 * h * ((inv_s2 * ep_ + v2 * em_) * ch)
    cov_xpy = 0.25 * h * (ep_ * ep_ - 1.0)
    cov_ypx = 0.25 * h * (1.0 - em_ * em_)
    return assemble_record(ins, var_x, var_y, var_px, var_py, cov_xpy, cov_ypx)


def beta_min_aux(t, ep, bg):
    """beta minimizing Delta x Delta p_x of the squeezed state.

    Written as 1/2 ln(2 / (1 + sqrt(1 + 8k))) with k = sigma^2 sigma'^2 / a^2,
    which equals the familiar 1/2 ln[(a sqrt(a^2 + 8 sigma^2 sigma'^2) - a^2)
    / (4 sigma^2 sigma'^2)] and tends to 0 as sigma' -> 0.
    """
    ins = instant(t, ep, bg)
    k = (ins.sigma * ins.velocity) ** 2
    return 0.5 * math.log(2.0 / (1.0 + math.sqrt(1.0 + 8.0 * k)))


@dataclass(frozen=True)
class BetaOptimum:
    beta: float
    value: float
    scan: object


def minimize_beta_nc(target, t, ep, bg, bracket=(-4.0, 4.0), points=64, tol=1e-8):
    """Minimize a squeezed product over real beta at fixed t.

    ``target`` is one of XPx, XY, PxPy (noncommutative) or xpx (auxiliary).
    A 64-point scan picks the basin, golden-section refines it; edge or
    multiple minima raise :class:`~ncoscillator.errors.NonUnimodalError`.
    """
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; choose from {sorted(TARGETS)}")
    ins = instant(t, ep, bg)
    name = TARGETS[target]

    def fn(beta):
        return getattr(_squeezed_record(ins, beta), name)

    res, scan = scan_then_golden(fn, bracket[0], bracket[1], points=points, tol=tol)
    return BetaOptimum(res.x, res.fun, scan)


def beta_scan_minimizer(target, t, ep, bg, bracket=(-4.0, 4.0), points=10001):
    """Brute-force grid minimizer, the oracle for :func:`minimize_beta_nc`."""
    ins = instant(t, ep, bg)
    name = TARGETS[target]
    grid = np.linspace(bracket[0], bracket[1], points)
    vals = np.array([getattr(_squeezed_record(ins, float(b)), name) for b in grid])
    k = int(np.argmin(vals))
    return float(grid[k]), float(vals[k])


# -- Gaussian Klauder ------------------------------------------------------------


@dataclass(frozen=True)
class GKSums:
    """S1, S3, N and the first moment sum_k k G^2 of the truncated GK sums."""

    m0: float
    s: float
    S1: float
    S3: float
    N: float
    first_moment: float
    truncation_terms: int

    def S2_at(self, x):
        """S2(x) = sum_k (k + x) G^2(k)."""
        return self.first_moment + x * self.N


def _gauss_weight(k, m0, s):
    return math.exp(-((k - m0) ** 2) / (4.0 * s * s))


def gk_sums(m0, s, tail_tol=1e-15, max_terms=100000):
    """Direct summation, stopped past the peak once every new term is below
    ``tail_tol`` times its running sum."""
    if not s > 0:
        raise DomainError("s must be positive")
    s1 = s3 = norm = first = 0.0
    k = 0
    g0, g1, g2 = (_gauss_weight(j, m0, s) for j in range(3))
    while k < max_terms:
        t1 = math.sqrt(k + 1.0) * g0 * g1
        t3 = mu_helper(k, k + 2) * g0 * g2
        tn = g0 * g0
        tm = k * tn
        s1 += t1
        s3 += t3
        norm += tn
        first += tm
        k += 1
        if k > m0 + 1:
            small = all(term <= tail_tol * total for term, total in
                        ((t1, s1), (t3, s3), (tn, norm), (tm, first)) if total > 0)
            if small:
                break
        g0, g1, g2 = g1, g2, _gauss_weight(k + 2, m0, s)
    return GKSums(m0, s, s1, s3, norm, first, k)


def gk_moments(spec, t, ep, bg, phase=None):
    """First and second moments of |n, m0, phi0, s> at time t.

    The angles are phi0 + Lambda and 2 phi0 + 2 Lambda, with Lambda(t) from
    ``phase`` (zero when omitted).
    """
    ins = instant(t, ep, bg)
    sums = gk_sums(spec.m0, spec.s)
    lam = phase.lambda_of_t(t) if phase is not None else 0.0
    a1 = spec.phi0 + lam
    a2 = 2.0 * spec.phi0 + 2.0 * lam
    h, s, v, n = ins.hbar, ins.sigma, ins.velocity, spec.n
    rh = math.sqrt(h)
    nn = sums.N
    r2 = math.sqrt(2.0)
    c1, s1 = math.cos(a1), math.sin(a1)
    c2, s2 = math.cos(a2), math.sin(a2)
    S1, S3 = sums.S1, sums.S3
    S2p = sums.S2_at(n + 1)
    S2m = sums.S2_at(-n)
    return {
        "x": -rh / nn * s * s1 * S1,
        "y": -rh / nn * s * c1 * S1,
        "px": rh / nn * (c1 / s - v * s1) * S1,
        "py": -rh / nn * (s1 / s + v * c1) * S1,
        "x2": h * s * s / (2.0 * nn) * (S2p - r2 * c2 * S3),
        "y2": h * s * s / (2.0 * nn) * (S2p + r2 * c2 * S3),
        "px2": h / (2.0 * nn) * (ins.chi2 * S2p + r2 * ((1.0 / s**2 - v * v) * c2 - 2.0 * v / s * s2) * S3),
        "py2": h / (2.0 * nn) * (ins.chi2 * S2p - r2 * ((1.0 / s**2 - v * v) * c2 - 2.0 * v / s * s2) * S3),
        "xpy": h / (2.0 * nn) * (r2 * (v * s * s2 - c2) * S3 + S2m),
        "ypx": h / (2.0 * nn) * (r2 * (v * s * s2 - c2) * S3 - S2m),
        "sums": sums,
        "instant": ins,
    }


def gk_uncertainties(spec, t, ep, bg, phase=None):
    mom = gk_moments(spec, t, ep, bg, phase)
    x, y, px, py = mom["x"], mom["y"], mom["px"], mom["py"]
    return assemble_record(
        mom["instant"],
        mom["x2"] - x * x,
        mom["y2"] - y * y,
        mom["px2"] - px * px,
        mom["py2"] - py * py,
        mom["xpy"] - x * py,
        mom["ypx"] - y * px,
    )


def uncertainties(spec, t, ep, bg, phase=None):
    """Dispatch on the coherent-state variant."""
    if isinstance(spec, Glauber):
        return glauber_uncertainties(spec.alpha, t, ep, bg)
    if isinstance(spec, Squeezed):
        return squeezed_uncertainties(spec.alpha, spec.beta, t, ep, bg)
    if isinstance(spec, GaussianKlauder):
        return gk_uncertainties(spec, t, ep, bg, phase)
    raise TypeError(f"unsupported coherent state {spec!r}")
