"""Complete elliptic integrals by the arithmetic-geometric mean.

Everything is parametrised by the *complementary* parameter ``m1 = 1 - m``.
Callers in this package always know ``m1`` as a ratio of non-negative
quantities (``|x-y|^2 / A``), so passing it directly avoids the cancellation
that makes ``1 - m`` useless for near-touching points.
"""

import math

import numpy as np

from ._backend import njit

_AGM_MAXITER = 40
_AGM_TOL = 1e-16
# below this m1, E comes from its logarithmic expansion (K (1 - s) cancels)
_E_SERIES_M1 = 1e-8


@njit(cache=True)
def ellipke_m1(m1):
    """Return ``(K(m), E(m))`` for ``m = 1 - m1``, ``0 < m1 <= 1``.

    Uses the AGM with the Gauss/Legendre ``c_n`` series for ``E``.
    Accurate to a few ulp for ``m1`` down to 1e-300 since ``b0 = sqrt(m1)``
    never goes through ``1 - m``.
    """
    a = 1.0
    b = math.sqrt(m1)
    m = 1.0 - m1
    s = 0.5 * m
    p = 0.5
    for _ in range(_AGM_MAXITER):
        c = 0.5 * (a - b)
        an = 0.5 * (a + b)
        b = math.sqrt(a * b)
        a = an
        p *= 2.0
        s += p * c * c
        if abs(c) <= _AGM_TOL * a:
            break
    k = 0.5 * math.pi / a
    if m1 < _E_SERIES_M1:
        lg = math.log(4.0) - 0.5 * math.log(m1)
        return k, 1.0 + 0.5 * m1 * (lg - 0.5) + 0.1875 * m1 * m1 * (lg - 13.0 / 12.0)
    return k, k * (1.0 - s)


def ellipke_m1_array(m1):
    """Vectorised :func:`ellipke_m1`; returns arrays ``(K, E)``."""
    m1 = np.asarray(m1, dtype=float)
    a = np.ones_like(m1)
    b = np.sqrt(m1)
    s = 0.5 * (1.0 - m1)
    p = 0.5
    for _ in range(_AGM_MAXITER):
        c = 0.5 * (a - b)
        an = 0.5 * (a + b)
        b = np.sqrt(a * b)
        a = an
        p *= 2.0
        s = s + p * c * c
        if np.all(np.abs(c) <= _AGM_TOL * a):
            break
    k = 0.5 * np.pi / a
    e = k * (1.0 - s)
    small = m1 < _E_SERIES_M1
    if np.any(small):
        ms = m1[small]
        lg = math.log(4.0) - 0.5 * np.log(ms)
        e[small] = 1.0 + 0.5 * ms * (lg - 0.5) + 0.1875 * ms * ms * (lg - 13.0 / 12.0)
    return k, e


# Power series of (2 - m) K(m) - 2 E(m) = (pi/2) sum_n c_n m^n, n >= 2.
# Used for small m where the closed form cancels catastrophically.
def _green_series_coeffs(nterms=30):
    k_prev = 1.0
    out = [0.0, 0.0]
    for n in range(1, nterms):
        k_n = k_prev * ((2.0 * n - 1.0) / (2.0 * n)) ** 2
        if n >= 2:
            out.append(4.0 * n * k_n / (2.0 * n - 1.0) - k_prev)
        k_prev = k_n
    return np.array(out)


GREEN_SERIES = _green_series_coeffs()
GREEN_SERIES_CUTOFF = 0.1


@njit(cache=True)
def green_bracket(m, m1, coeffs):
    """``(2 - m) K(m) - 2 E(m)`` with a series branch for small ``m``."""
    if m < GREEN_SERIES_CUTOFF:
        acc = 0.0
        mn = m * m
        for n in range(2, coeffs.shape[0]):
            acc += coeffs[n] * mn
            mn *= m
        return 0.5 * math.pi * acc
    k, e = ellipke_m1(m1)
    return (2.0 - m) * k - 2.0 * e


def green_bracket_array(m, m1):
    m = np.asarray(m, dtype=float)
    m1 = np.asarray(m1, dtype=float)
    out = np.empty_like(m)
    small = m < GREEN_SERIES_CUTOFF
    if np.any(small):
        ms = m[small]
        acc = np.zeros_like(ms)
        mn = ms * ms
        for n in range(2, GREEN_SERIES.shape[0]):
            acc += GREEN_SERIES[n] * mn
            mn = mn * ms
        out[small] = 0.5 * np.pi * acc
    big = ~small
    if np.any(big):
        k, e = ellipke_m1_array(m1[big])
        out[big] = (2.0 - m[big]) * k - 2.0 * e
    return out
