"""Bracketed golden-section minimization and a coarse unimodality scan."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonUnimodalError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MinResult:
    x: float
    fun: float
    iterations: int


def golden_section(fn, lo, hi, tol=1e-8, max_iter=500):
    """Minimize a unimodal ``fn`` on [lo, hi] until the bracket is below ``tol``.

    Works with any ordered number type that supports the arithmetic used
    here (floats, mpmath mpf).
    """
    if not hi > lo:
        raise ValueError("empty bracket")
    ratio = INV_PHI
    if type(lo).__module__.startswith("mpmath"):
        import mpmath

        ratio = (mpmath.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = fn(c), fn(d)
    it = 0
    while abs(b - a) > tol and it < max_iter:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = fn(d)
        it += 1
    x = (a + b) / 2
    return MinResult(x, fn(x), it)


@dataclass(frozen=True)
class Scan:
    x: np.ndarray
    values: np.ndarray


def scan_then_golden(fn, lo, hi, points=64, tol=1e-8):
    """Sample ``fn`` on ``points`` nodes, then refine around the best one.

    A minimum on the bracket boundary, or several separated local minima
    among the samples, raise :class:`NonUnimodalError` carrying the scan.
    """
    xs = np.linspace(lo, hi, points)
    vals = np.array([fn(float(x)) for x in xs])
    scan = Scan(xs, vals)
    k = int(np.argmin(vals))
    if k == 0 or k == points - 1:
        raise NonUnimodalError(f"minimum at bracket edge x={xs[k]:.6g}", scan)
    interior = np.flatnonzero((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:])) + 1
    # adjacent minima are one flat bottom; separated ones are distinct dips
    if interior.size > 1 and np.any(np.diff(interior) > 1):
        raise NonUnimodalError("several local minima on the scan grid", scan)
    res = golden_section(fn, float(xs[k - 1]), float(xs[k + 1]), tol=tol)
    return res, scan
