"""Background fields theta(t), Omega(t) and the Hamiltonian coefficients.

In canonical variables the oscillator on the deformed plane reads

    H(t) = a(t)/2 (px^2 + py^2) + b(t)/2 (x^2 + y^2) + c(t) (px y - x py)

with a = 1/m + m w^2 theta^2 / (4 hbar^2), b = m w^2 + Omega^2 / (4 m hbar^2)
and c = m w^2 theta / (2 hbar) + Omega / (2 hbar m).  A background is given
either by the two structure functions (``theta_omega`` mode) or by prescribing
a(t), b(t) directly (``direct_ab`` mode); in the latter case theta and Omega
are recovered through the inverse map, which is only real for a >= 1/m and
b >= m w^2.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

THETA_OMEGA = "theta_omega"
DIRECT_AB = "direct_ab"


@dataclass(frozen=True)
class PhysicalConstants:
    m: float = 1.0
    hbar: float = 1.0
    omega: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        for name in ("m", "hbar", "omega", "tau"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"physical constant {name} must be positive, got {value}")


# -- time-dependent families -------------------------------------------------
# Each family is callable on scalars or arrays and exposes ``deriv``/``deriv2``.


@dataclass(frozen=True)
class Constant:
    value: float

    def __call__(self, t):
        return self.value + 0.0 * np.asarray(t, dtype=float)

    def deriv(self, t):
        return 0.0 * np.asarray(t, dtype=float)

    def deriv2(self, t):
        return 0.0 * np.asarray(t, dtype=float)


@dataclass(frozen=True)
class Exponential:
    """amplitude * exp(rate * t)."""

    amplitude: float
    rate: float

    def __call__(self, t):
        return self.amplitude * np.exp(self.rate * np.asarray(t, dtype=float))

    def deriv(self, t):
        return self.rate * self(t)

    def deriv2(self, t):
        return self.rate**2 * self(t)


@dataclass(frozen=True)
class Sinusoidal:
    """amplitude * sin(frequency * t)."""

    amplitude: float
    frequency: float

    def __call__(self, t):
        return self.amplitude * np.sin(self.frequency * np.asarray(t, dtype=float))

    def deriv(self, t):
        return self.amplitude * self.frequency * np.cos(self.frequency * np.asarray(t, dtype=float))

    def deriv2(self, t):
        return -self.frequency**2 * self(t)


@dataclass(frozen=True)
class Rational:
    """coefficient * (mu - gamma t)^power, real for t < mu / gamma."""

    coefficient: float
    gamma: float
    mu: float
    power: float

    def _base(self, t):
        s = self.mu - self.gamma * np.asarray(t, dtype=float)
        if np.any(s <= 0):
            raise DomainError(f"rational family requires t < mu/gamma = {self.mu / self.gamma:.12g}")
        return s

    def __call__(self, t):
        return self.coefficient * self._base(t) ** self.power

    def deriv(self, t):
        s = self._base(t)
        return -self.gamma * self.power * self.coefficient * s ** (self.power - 1.0)

    def deriv2(self, t):
        s = self._base(t)
        return self.gamma**2 * self.power * (self.power - 1.0) * self.coefficient * s ** (self.power - 2.0)


@dataclass(frozen=True)
class Coefficients:
    a: float
    b: float
    c: float


class _DerivedA:
    """a(t) induced by a theta family."""

    def __init__(self, theta, constants):
        self.theta = theta
        self.k = constants.m * constants.omega**2 / (4.0 * constants.hbar**2)
        self.base = 1.0 / constants.m

    def __call__(self, t):
        th = self.theta(t)
        return self.base + self.k * th * th

    def deriv(self, t):
        return 2.0 * self.k * self.theta(t) * self.theta.deriv(t)

    def deriv2(self, t):
        d = self.theta.deriv(t)
        return 2.0 * self.k * (d * d + self.theta(t) * self.theta.deriv2(t))


class _DerivedB:
    """b(t) induced by an Omega family."""

    def __init__(self, omega_field, constants):
        self.omega_field = omega_field
        self.k = 1.0 / (4.0 * constants.m * constants.hbar**2)
        self.base = constants.m * constants.omega**2

    def __call__(self, t):
        om = self.omega_field(t)
        return self.base + self.k * om * om

    def deriv(self, t):
        return 2.0 * self.k * self.omega_field(t) * self.omega_field.deriv(t)

    def deriv2(self, t):
        d = self.omega_field.deriv(t)
        return 2.0 * self.k * (d * d + self.omega_field(t) * self.omega_field.deriv2(t))


@dataclass(frozen=True)
class BackgroundSpec:
    """A background on the validity interval ``[t_start, t_stop]``.

    Build through :meth:`theta_omega` or :meth:`direct_ab`; the stop time is
    clipped to the cutoff time when one exists.
    """

    mode: str
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    theta_family: object = None
    omega_family: object = None
    a_family_: object = None
    b_family_: object = None
    t_start: float = 0.0
    t_stop: float = math.inf

    @classmethod
    def theta_omega(cls, theta, omega_field, constants=None, t_start=0.0, t_stop=math.inf):
        return cls(THETA_OMEGA, constants or PhysicalConstants(), theta, omega_field,
                   t_start=t_start, t_stop=t_stop)

    @classmethod
    def direct_ab(cls, a_family, b_family, constants=None, t_start=0.0, t_stop=math.inf):
        bg = cls(DIRECT_AB, constants or PhysicalConstants(), a_family_=a_family,
                 b_family_=b_family, t_start=t_start, t_stop=t_stop)
        tc = cutoff_time(bg)
        if tc is not None and tc < t_stop:
            bg = cls(DIRECT_AB, bg.constants, a_family_=a_family, b_family_=b_family,
                     t_start=t_start, t_stop=tc)
        return bg

    @property
    def a_family(self):
        if self.mode == THETA_OMEGA:
            return _DerivedA(self.theta_family, self.constants)
        return self.a_family_

    @property
    def b_family(self):
        if self.mode == THETA_OMEGA:
            return _DerivedB(self.omega_family, self.constants)
        return self.b_family_

    @property
    def validity(self):
        return (self.t_start, self.t_stop)

    def check_time(self, t):
        t_arr = np.asarray(t, dtype=float)
        # a relative slack keeps grid endpoints computed as start + k*h inside
        slack = 1e-12 * max(1.0, abs(self.t_start), abs(self.t_stop) if math.isfinite(self.t_stop) else 1.0)
        if np.any(t_arr < self.t_start - slack) or np.any(t_arr > self.t_stop + slack):
            bad = t_arr[(t_arr < self.t_start - slack) | (t_arr > self.t_stop + slack)].ravel()[0]
            raise DomainError(
                f"t={bad:.12g} outside background validity [{self.t_start:.12g}, {self.t_stop:.12g}]",
                t=float(bad))

    def fields(self, t):
        """Return (theta(t), Omega(t)); in direct_ab mode via the inverse map."""
        if self.mode == THETA_OMEGA:
            return self.theta_family(t), self.omega_family(t)
        return invert_background(self.a_family_(t), self.b_family_(t), self.constants, t=t)

    def a(self, t):
        return self.a_family(t)

    def b(self, t):
        return self.b_family(t)

    def c(self, t):
        theta, om = self.fields(t)
        k = self.constants
        return k.m * k.omega**2 * theta / (2.0 * k.hbar) + om / (2.0 * k.hbar * k.m)


def coefficients(bg, t):
    """Hamiltonian coefficients (a, b, c) of ``bg`` at time ``t``."""
    bg.check_time(t)
    a = bg.a(t)
    b = bg.b(t)
    c = bg.c(t)  # in direct_ab mode this raises on a < 1/m or b < m w^2
    if np.ndim(t) == 0:
        return Coefficients(float(a), float(b), float(c))
    return Coefficients(a, b, c)


def invert_background(a, b, constants, t=None):
    """Recover nonnegative (theta, Omega) from (a, b).

    Raises :class:`DomainError` when a < 1/m or b < m w^2; ``t`` is only used
    to report where that happened.
    """
    k = constants
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = a - 1.0 / k.m
    db = b - k.m * k.omega**2
    # round-off below the threshold is clipped, anything larger is an error
    tol_a = 1e-13 * max(1.0, 1.0 / k.m)
    tol_b = 1e-13 * max(1.0, k.m * k.omega**2)
    for name, d, tol, lim in (("a", da, tol_a, "1/m"), ("b", db, tol_b, "m*omega^2")):
        if np.any(d < -tol):
            idx = np.flatnonzero(np.ravel(d) < -tol)[0]
            where = None
            if t is not None:
                where = float(np.ravel(np.broadcast_to(np.asarray(t, dtype=float), d.shape))[idx])
            msg = f"{name} < {lim}: inverse map to real theta, Omega fails"
            if where is not None:
                msg += f" at t={where:.12g}"
            raise DomainError(msg, t=where)
    theta = (2.0 * k.hbar / (k.omega * math.sqrt(k.m))) * np.sqrt(np.clip(da, 0.0, None))
    om = 2.0 * k.hbar * np.sqrt(k.m * np.clip(db, 0.0, None))
    if theta.ndim == 0:
        return float(theta), float(om)
    return theta, om


def cutoff_time(bg):
    """Time after which a Chiellini-type direct_ab background stops being real.

    Exponential a(t) = alpha exp(-gamma t) gives ln(m alpha)/gamma; the rational
    family gives mu/gamma.  Other backgrounds have no cutoff (``None``).
    """
    if bg.mode != DIRECT_AB:
        return None
    fam = bg.a_family_
    if isinstance(fam, Exponential) and fam.rate < 0 and fam.amplitude > 0:
        return math.log(bg.constants.m * fam.amplitude) / (-fam.rate)
    if isinstance(fam, Rational) and fam.gamma > 0 and fam.mu > 0:
        return fam.mu / fam.gamma
    return None
