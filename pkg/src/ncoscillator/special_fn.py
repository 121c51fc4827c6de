"""Bessel functions of order 0 (and 1, for derivatives) and U(-m, b, z).

Small and moderate arguments use Miller's backward recurrence normalised by
``J0 + 2 * sum(J_2k) = 1``; the second-kind functions then follow from their
Neumann series in the same J sequence.  Large arguments use the Hankel
asymptotic expansion.
"""

import math

import numpy as np

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
_ASYMPTOTIC_FROM = 25.0
_RESCALE = 1e150


def _miller(x):
    """Return J0, J1, Y0, Y1 for an array of 0 < x <= _ASYMPTOTIC_FROM."""
    xmax = float(np.max(x))
    n_start = 2 * ((int(xmax) + 40 + int(4.0 * math.sqrt(xmax))) // 2)

    j_next = np.zeros_like(x)          # J_{k+1}
    j_cur = np.full_like(x, 1e-30)     # J_k, k = n_start
    norm = np.zeros_like(x)            # 2 * sum_{k>=1} J_2k
    y0_sum = np.zeros_like(x)          # sum_{k>=1} (-1)^k J_2k / k
    y1_sum = np.zeros_like(x)          # sum_{k>=1} (-1)^k (J_{2k-1} - J_{2k+1}) / k

    def accumulate(k, jk):
        nonlocal norm, y0_sum, y1_sum
        if k == 0:
            return
        if k % 2 == 0:
            half = k // 2
            norm = norm + 2.0 * jk
            y0_sum = y0_sum + (-1.0) ** half * jk / half
        else:
            up = (k + 1) // 2            # J_k appears as J_{2up-1}
            y1_sum = y1_sum + (-1.0) ** up * jk / up
            down = (k - 1) // 2          # and as -J_{2down+1}
            if down >= 1:
                y1_sum = y1_sum - (-1.0) ** down * jk / down

    accumulate(n_start, j_cur)
    j1 = None
    for k in range(n_start, 0, -1):
        j_prev = (2.0 * k / x) * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        accumulate(k - 1, j_cur)
        if k - 1 == 1:
            j1 = j_cur.copy()
        big = np.abs(j_cur) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            j_cur = j_cur * scale
            j_next = j_next * scale
            norm = norm * scale
            y0_sum = y0_sum * scale
            y1_sum = y1_sum * scale
            if j1 is not None:
                j1 = j1 * scale

    total = j_cur + norm
    j0 = j_cur / total
    j1 = j1 / total
    y0_sum = y0_sum / total
    y1_sum = y1_sum / total

    log_term = np.log(x / 2.0) + EULER_GAMMA
    y0 = (2.0 / math.pi) * (log_term * j0 - 2.0 * y0_sum)
    y1 = (2.0 / math.pi) * (-j0 / x + log_term * j1 + y1_sum)
    return j0, j1, y0, y1


def _hankel(x, nu):
    """Asymptotic J_nu, Y_nu for large x (nu = 0 or 1)."""
    mu4 = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    term = np.ones_like(x)
    k = 1
    prev = np.full_like(x, np.inf)
    while k < 60:
        term = term * (mu4 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        size = np.abs(term)
        if np.all((size < 1e-17) | (size > prev)):
            break
        use = size <= prev
        if k % 2 == 1:
            q = q + np.where(use, (-1.0) ** ((k - 1) // 2) * term, 0.0)
        else:
            p = p + np.where(use, (-1.0) ** (k // 2) * term, 0.0)
        prev = np.where(use, size, prev)
        k += 1
    chi = x - (0.5 * nu + 0.25) * math.pi
    amp = np.sqrt(2.0 / (math.pi * x))
    return amp * (p * np.cos(chi) - q * np.sin(chi)), amp * (p * np.sin(chi) + q * np.cos(chi))


def _bessel_all(x):
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    out = [np.empty_like(flat) for _ in range(4)]
    small = flat <= _ASYMPTOTIC_FROM
    pos = flat > 0
    sel = small & pos
    if np.any(sel):
        for dst, val in zip(out, _miller(flat[sel])):
            dst[sel] = val
    big = ~small
    if np.any(big):
        j0, y0 = _hankel(flat[big], 0)
        j1, y1 = _hankel(flat[big], 1)
        out[0][big], out[1][big], out[2][big], out[3][big] = j0, j1, y0, y1
    zero = flat == 0
    if np.any(zero):
        out[0][zero], out[1][zero] = 1.0, 0.0
        out[2][zero], out[3][zero] = -np.inf, -np.inf
    neg = flat < 0
    if np.any(neg):
        for dst in out:
            dst[neg] = np.nan
    return [o.reshape(x.shape) if x.ndim else float(o[0]) for o in out]


def bessel_j0(x):
    """Bessel function of the first kind, order 0, for x >= 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("bessel_j0 is implemented for x >= 0")
    return _bessel_all(x)[0]


def bessel_y0(x):
    """Bessel function of the second kind, order 0; singular at x = 0."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("bessel_y0 requires x > 0")
    return _bessel_all(x)[2]


def bessel_j0_y0_with_derivatives(x):
    """Return (J0, J0', Y0, Y0') at x > 0, using J0' = -J1 and Y0' = -Y1."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("Y0 requires x > 0")
    j0, j1, y0, y1 = _bessel_all(x)
    return j0, -j1, y0, -y1


def hyper_u_coefficients(m, b):
    """Coefficients c_k of U(-m, b, z) = sum_k c_k z^k.

    U(-m, b, z) = (-1)^m sum_k C(m, k) (b + k)_{m-k} (-z)^k.  Exact when ``b``
    is an int or Fraction.
    """
    if m < 0 or int(m) != m:
        raise DomainError("first argument of U must be -m with m a nonnegative integer")
    m = int(m)
    coeffs = []
    for k in range(m + 1):
        rising = 1
        for j in range(m - k):
            rising = rising * (b + k + j)
        coeffs.append((-1) ** (m + k) * math.comb(m, k) * rising)
    return coeffs


def hyper_u_neg_int(m, b, z):
    """Confluent hypergeometric U(-m, b, z), a degree-m polynomial in z."""
    coeffs = hyper_u_coefficients(m, b)
    if isinstance(z, (int, float)) or np.isscalar(z):
        acc = 0
        for c in reversed(coeffs):
            acc = acc * z + c
        return acc
    z = np.asarray(z)
    acc = np.zeros_like(z, dtype=np.result_type(z, float))
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc
