"""Eigenfunctions of the Hermitian invariant and the Lewis-Riesenfeld phases.

In polar coordinates the invariant eigenfunctions are

    psi_{n,m-n}(r, theta) = lambda_n (i sqrt(hbar) sigma)^m / sqrt(m!)
                            r^(n-m) e^{i (m-n) theta} e^{-kappa r^2}
                            U(-m, 1-m+n, r^2 / (hbar sigma^2))

with kappa = (a - i sigma sigma') / (2 a hbar sigma^2).  Every radial factor is
a Laurent polynomial in r times the same Gaussian, so the differential
operators of the model (ladder operators, invariant, Hamiltonian) act on them
exactly; only time derivatives are taken by finite differences.

The quantum layer uses the EP solution rescaled to tau = 1,
sigma_q = sigma tau^(-1/4), which solves the same equation with tau = 1.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, QuadratureError
from .special_fn import hyper_u_coefficients


@dataclass(frozen=True)
class QuantumLabel:
    n: int
    m: int

    def __post_init__(self):
        for name in ("n", "m"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a nonnegative integer, got {v}")

    @property
    def ell(self):
        return self.m - self.n


# -- Laurent polynomial times Gaussian ----------------------------------------


class RadialFunction:
    """sum_k c_k r^k * exp(-kappa r^2), with integer (possibly negative) k."""

    __slots__ = ("coeffs", "kappa")

    def __init__(self, coeffs, kappa):
        self.coeffs = {k: complex(v) for k, v in coeffs.items() if v != 0}
        self.kappa = complex(kappa)

    def _check(self, other):
        if self.kappa != other.kappa:
            raise ValueError("radial functions carry different Gaussian factors")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return RadialFunction(out, self.kappa)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return RadialFunction({k: scalar * v for k, v in self.coeffs.items()}, self.kappa)

    __rmul__ = __mul__

    def __neg__(self):
        return (-1.0) * self

    def times_r(self, power):
        return RadialFunction({k + power: v for k, v in self.coeffs.items()}, self.kappa)

    def deriv(self):
        out = {}
        for k, v in self.coeffs.items():
            if k != 0:
                out[k - 1] = out.get(k - 1, 0.0) + k * v
            out[k + 1] = out.get(k + 1, 0.0) - 2.0 * self.kappa * v
        return RadialFunction(out, self.kappa)

    def conj(self):
        return RadialFunction({k: v.conjugate() for k, v in self.coeffs.items()},
                              self.kappa.conjugate())

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        acc = np.zeros(r.shape, dtype=complex)
        for k, v in self.coeffs.items():
            acc = acc + v * r**k
        return acc * np.exp(-self.kappa * r * r)


class PolarField:
    """sum_l R_l(r) e^{i l theta}: a wavefunction in polar coordinates."""

    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = {ell: f for ell, f in parts.items() if f.coeffs}

    def __add__(self, other):
        out = dict(self.parts)
        for ell, f in other.parts.items():
            out[ell] = out[ell] + f if ell in out else f
        return PolarField(out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, scalar):
        return PolarField({ell: scalar * f for ell, f in self.parts.items()})

    __rmul__ = __mul__

    def map(self, fn):
        """Apply ``fn(ell, R)`` to each component."""
        return PolarField({ell: fn(ell, f) for ell, f in self.parts.items()})

    def shift(self, s):
        """Multiply by e^{i s theta}."""
        return PolarField({ell + s: f for ell, f in self.parts.items()})

    def radial(self, r):
        """Component values {ell: R_ell(r)}."""
        return {ell: f(r) for ell, f in self.parts.items()}

    def __call__(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        shape = np.broadcast_shapes(r.shape, theta.shape)
        acc = np.zeros(shape, dtype=complex)
        for ell, f in self.parts.items():
            acc = acc + f(r) * np.exp(1j * ell * theta)
        return acc


# -- operators -----------------------------------------------------------------


@dataclass(frozen=True)
class Snapshot:
    """The time-dependent data the operators need at one instant."""

    sigma: float
    dsigma: float
    a: float
    b: float
    c: float
    hbar: float

    @property
    def kappa(self):
        return (self.a - 1j * self.sigma * self.dsigma) / (2.0 * self.a * self.hbar * self.sigma**2)


def p_r(field, hbar):
    """-i hbar (d/dr + 1/(2r)), the Hermitian radial momentum."""
    return field.map(lambda ell, f: (-1j * hbar) * (f.deriv() + 0.5 * f.times_r(-1)))


def p_theta(field, hbar):
    return field.map(lambda ell, f: (hbar * ell) * f)


def _radial_part(field, snap):
    """sigma p_r - (sigma'/a) r."""
    return snap.sigma * p_r(field, snap.hbar) - (snap.dsigma / snap.a) * field.map(
        lambda ell, f: f.times_r(1))


def _angular_part(field, snap):
    """r/sigma + (sigma/r)(p_theta + hbar/2)."""
    return field.map(lambda ell, f: (1.0 / snap.sigma) * f.times_r(1)
                     + (snap.sigma * snap.hbar * (ell + 0.5)) * f.times_r(-1))


def apply_a(field, snap):
    shifted = field.shift(-1)
    out = _radial_part(shifted, snap) - 1j * _angular_part(shifted, snap)
    return (0.5 / math.sqrt(snap.hbar)) * out


def apply_adag(field, snap):
    out = _radial_part(field, snap) + 1j * _angular_part(field, snap)
    return (0.5 / math.sqrt(snap.hbar)) * out.shift(1)


def apply_invariant(field, snap):
    """I/4 - p_theta/2 with I = r^2/sigma^2 + (sigma p_r - sigma' r/a)^2
    + sigma^2 p_theta^2 / r^2 - sigma^2 hbar^2 / (4 r^2)."""
    s, h = snap.sigma, snap.hbar
    q = _radial_part(_radial_part(field, snap), snap)
    rest = field.map(lambda ell, f: (1.0 / s**2) * f.times_r(2)
                     + (s**2 * h**2 * (ell * ell - 0.25)) * f.times_r(-2))
    return 0.25 * (q + rest) - 0.5 * p_theta(field, h)


def apply_hamiltonian(field, snap):
    """H = (a/2)(p_r^2 + p_theta^2/r^2 - hbar^2/(4 r^2)) + (b/2) r^2 - c p_theta."""
    h = snap.hbar
    kin = p_r(p_r(field, h), h) + field.map(
        lambda ell, f: (h**2 * (ell * ell - 0.25)) * f.times_r(-2))
    pot = field.map(lambda ell, f: f.times_r(2))
    return 0.5 * snap.a * kin + 0.5 * snap.b * pot - snap.c * p_theta(field, h)


def apply_x(field):
    return field.map(lambda ell, f: 0.5 * f.times_r(1)).shift(1) + \
        field.map(lambda ell, f: 0.5 * f.times_r(1)).shift(-1)


def apply_y(field):
    return field.map(lambda ell, f: (-0.5j) * f.times_r(1)).shift(1) + \
        field.map(lambda ell, f: (0.5j) * f.times_r(1)).shift(-1)


def _d_pieces(field):
    up = field.map(lambda ell, f: 0.5 * (f.deriv() - ell * f.times_r(-1))).shift(1)
    down = field.map(lambda ell, f: 0.5 * (f.deriv() + ell * f.times_r(-1))).shift(-1)
    return up, down


def apply_px(field, hbar):
    up, down = _d_pieces(field)
    return (-1j * hbar) * (up + down)


def apply_py(field, hbar):
    up, down = _d_pieces(field)
    return (-1j * hbar) * (-1j) * (up - down)


# -- states ---------------------------------------------------------------------


class PhaseIntegral:
    """Lambda(t) = C(t) - A(t) with C = int c ds and A = int a/sigma^2 ds.

    Both integrals start at the lower end of the EP validity interval.
    """

    def __init__(self, ep, background):
        self.ep = ep
        self.background = background
        self.t0 = float(ep.validity[0])
        self._tau = background.constants.tau

    def _sigma2(self, s):
        return self.ep.sigma(s) ** 2 / math.sqrt(self._tau)

    def _integrate(self, fn, t):
        val, err = quad(fn, self.t0, t, epsabs=1e-14, epsrel=1e-13, limit=400)
        if err > 1e-9 * max(1.0, abs(val)):
            raise QuadratureError("phase integral did not converge", err)
        return val

    def c_integral(self, t):
        return self._integrate(lambda s: float(self.background.c(s)), float(t))

    def a_integral(self, t):
        return self._integrate(lambda s: float(self.background.a(s)) / self._sigma2(s), float(t))

    def lambda_of_t(self, t):
        return self.c_integral(t) - self.a_integral(t)

    def alpha(self, n, ell, t):
        """alpha_{n,l}(t) = (n + l) Lambda(t)."""
        return (n + ell) * self.lambda_of_t(t)

    def vacuum_phase(self, n, t):
        """Phase of |n,-n> fixed by the Schrodinger equation: -n C - (n+1) A."""
        return -n * self.c_integral(t) - (n + 1) * self.a_integral(t)

    def dressed_phase(self, n, ell, t):
        c_int = self.c_integral(t)
        a_int = self.a_integral(t)
        return (n + ell) * (c_int - a_int) - n * c_int - (n + 1) * a_int


@dataclass(frozen=True, eq=False)
class WaveState:
    label: QuantumLabel
    ep: object
    background: object
    phase: PhaseIntegral = None

    @classmethod
    def build(cls, n, m, ep, background):
        return cls(QuantumLabel(n, m), ep, background, PhaseIntegral(ep, background))

    @property
    def constants(self):
        return self.background.constants


def snapshot(ep, background, t):
    """Operator data at time t using sigma rescaled to tau = 1."""
    t = float(t)
    ep.check_time(t)
    background.check_time(t)
    s, ds = ep(t)
    scale = background.constants.tau ** -0.25
    return Snapshot(float(s) * scale, float(ds) * scale, float(background.a(t)),
                    float(background.b(t)), float(background.c(t)), background.constants.hbar)


def eigenfunction(n, m, snap):
    """psi_{n,m-n} at one instant as a PolarField (no time-dependent phase)."""
    h, s = snap.hbar, snap.sigma
    scale = h * s * s
    lam = 1.0 / math.sqrt(math.pi * math.factorial(n) * scale ** (n + 1))
    pref = lam * (1j * math.sqrt(h) * s) ** m / math.sqrt(math.factorial(m))
    coeffs = {}
    for k, ck in enumerate(hyper_u_coefficients(m, 1 - m + n)):
        if ck:
            coeffs[n - m + 2 * k] = pref * float(ck) / scale**k
    return PolarField({m - n: RadialFunction(coeffs, snap.kappa)})


def state_field(ws, t, with_phase=False):
    snap = snapshot(ws.ep, ws.background, t)
    field = eigenfunction(ws.label.n, ws.label.m, snap)
    if with_phase:
        field = np.exp(1j * ws.phase.dressed_phase(ws.label.n, ws.label.ell, t)) * field
    return field, snap


def eval_state(ws, r, theta, t, with_phase=False):
    """psi_{n,m-n}(r, theta) at time t, times its Lewis-Riesenfeld phase if asked."""
    if np.any(np.asarray(r) < 0):
        raise DomainError("r must be nonnegative")
    field, _ = state_field(ws, t, with_phase)
    return field(r, theta)


# -- quadrature -------------------------------------------------------------------


@dataclass(frozen=True)
class RadialGrid:
    r: np.ndarray
    w: np.ndarray   # weights for int f(r) r dr

    @classmethod
    def build(cls, snap, order=8, nodes=160):
        """Gauss-Legendre on [0, R] with R^2 = hbar sigma^2 (40 + 4 order)."""
        radius = math.sqrt(snap.hbar * snap.sigma**2 * (40.0 + 4.0 * order))
        x, w = np.polynomial.legendre.leggauss(nodes)
        r = 0.5 * radius * (x + 1.0)
        return cls(r, 0.5 * radius * w * r)


def field_inner(f, g, grid):
    """<f|g> = int conj(f) g r dr dtheta, angles integrated exactly."""
    total = 0.0j
    for ell, gf in g.parts.items():
        ff = f.parts.get(ell)
        if ff is not None:
            total += 2.0 * math.pi * np.sum(grid.w * np.conj(ff(grid.r)) * gf(grid.r))
    return total


def field_norm(f, grid):
    return math.sqrt(max(field_inner(f, f, grid).real, 0.0))


def orthonormality(ws_a, ws_b, t, nodes=160, theta_points=64, tol=1e-10):
    """<A|B> by a 2D rule: Gauss-Legendre in r, trapezoid in theta.

    The radial rule is repeated at twice the node count; a disagreement above
    ``tol`` raises :class:`QuadratureError` with the observed difference.
    """
    fa, snap = state_field(ws_a, t)
    fb, _ = state_field(ws_b, t)
    order = ws_a.label.n + ws_a.label.m + ws_b.label.n + ws_b.label.m
    theta = 2.0 * math.pi * np.arange(theta_points) / theta_points

    def integral(count):
        grid = RadialGrid.build(snap, order, count)
        vals = np.conj(fa(grid.r[:, None], theta[None, :])) * fb(grid.r[:, None], theta[None, :])
        return np.sum(grid.w[:, None] * vals) * (2.0 * math.pi / theta_points)

    coarse = integral(nodes)
    fine = integral(2 * nodes)
    if abs(fine - coarse) > tol:
        raise QuadratureError("radial quadrature not converged", abs(fine - coarse))
    return complex(fine)


# -- residual checks -------------------------------------------------------------


def _grid_for(snap, label, nodes):
    return RadialGrid.build(snap, 2 * (label.n + label.m) + 4, nodes)


def annihilation_residual(ws, t, nodes=160, dsigma_scale=1.0):
    """||a psi_{n,-n}|| / ||psi|| on the radial grid.

    ``dsigma_scale`` perturbs sigma' inside the operator only, for sensitivity
    checks.
    """
    if ws.label.m != 0:
        raise DomainError("annihilation residual is defined for m = 0")
    field, snap = state_field(ws, t)
    op_snap = Snapshot(snap.sigma, snap.dsigma * dsigma_scale, snap.a, snap.b, snap.c, snap.hbar)
    grid = _grid_for(snap, ws.label, nodes)
    return field_norm(apply_a(field, op_snap), grid) / field_norm(field, grid)


def ladder_residual(ws, t, nodes=160):
    """||a^dag psi_{n,m-n} - sqrt(m+1) psi_{n,m+1-n}|| relative to the target."""
    field, snap = state_field(ws, t)
    target = math.sqrt(ws.label.m + 1) * eigenfunction(ws.label.n, ws.label.m + 1, snap)
    grid = _grid_for(snap, QuantumLabel(ws.label.n, ws.label.m + 1), nodes)
    return field_norm(apply_adag(field, snap) - target, grid) / field_norm(target, grid)


@dataclass(frozen=True)
class InvariantCheck:
    eigenvalue: float
    rayleigh: complex
    residual: float


def invariant_residual(ws, t, nodes=160):
    """Relative norm of (I_hat - hbar(n+1/2)) psi plus the Rayleigh quotient."""
    field, snap = state_field(ws, t)
    grid = _grid_for(snap, ws.label, nodes)
    ip = apply_invariant(field, snap)
    eig = snap.hbar * (ws.label.n + 0.5)
    rayleigh = field_inner(field, ip, grid) / field_inner(field, field, grid)
    res = field_norm(ip - eig * field, grid) / (eig * field_norm(field, grid))
    return InvariantCheck(eig, complex(rayleigh), res)


def schrodinger_residual(ws, t, dt=1e-4, with_phase=True, nodes=160):
    """||i hbar d_t psi - H psi|| / ||H psi|| with a centred difference in t."""
    field, snap = state_field(ws, t, with_phase)
    grid = _grid_for(snap, ws.label, nodes)
    ell = ws.label.ell
    plus, _ = state_field(ws, t + dt, with_phase)
    minus, _ = state_field(ws, t - dt, with_phase)
    dpsi = (plus.parts[ell](grid.r) - minus.parts[ell](grid.r)) / (2.0 * dt)
    hpsi = apply_hamiltonian(field, snap).parts[ell](grid.r)
    res = 1j * snap.hbar * dpsi - hpsi
    num = np.sqrt(np.sum(grid.w * np.abs(res) ** 2))
    den = np.sqrt(np.sum(grid.w * np.abs(hpsi) ** 2))
    return float(num / den)


def write_density_csv(path, ws, t, r, theta, fmt="%.12g"):
    """|psi|^2 on the product grid r x theta, columns r, theta, density."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    dens = np.abs(eval_state(ws, r[:, None], theta[None, :], t)) ** 2
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["r", "theta", "density"])
        for i, rv in enumerate(r):
            for j, tv in enumerate(theta):
                writer.writerow([fmt % rv, fmt % tv, fmt % dens[i, j]])
