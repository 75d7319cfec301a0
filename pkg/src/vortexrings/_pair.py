"""Scalar closed forms of the half-plane kernel for one (target, source) pair.

``s2`` is the (possibly smoothed) squared separation ``|x-y|^2 + delta^2``;
with ``delta = 0`` these are the exact kernels. Substituting
``theta = pi - 2 phi`` turns the angular integrals into complete elliptic
integrals with ``A = s2 + 4 x2 y2`` and ``m1 = s2 / A``:

    H1 = [K - E + 2 y2 (y2 - x2) E / s2] / (2 pi sqrt(A))
    H2 = (x1 - y1) [E - K + 2 x2 y2 E / s2] / (2 pi x2 sqrt(A))
    S  = sqrt(A) [(2 - m) K - 2 E] / (4 pi)

The planar part ``K(x-y)`` is subtracted analytically so that the bounded
remainder never goes through a difference of two O(1/|x-y|) numbers.
"""

import math

from ._backend import njit
from .special import GREEN_SERIES, ellipke_m1, green_bracket

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


@njit(cache=True)
def h_minus_k(x1, x2, y1, y2, s2):
    """Return ``(H1 - K1, H2 - K2, K1, K2)`` at smoothed separation ``s2``."""
    dz = x1 - y1
    kp1 = (y2 - x2) / (TWO_PI * s2)
    kp2 = dz / (TWO_PI * s2)
    if y2 == 0.0:
        return -kp1, -kp2, kp1, kp2
    a = s2 + 4.0 * x2 * y2
    sa = math.sqrt(a)
    kk, ee = ellipke_m1(s2 / a)
    # 2 y2 E - sqrt(A), written without the O(1) cancellation
    bk = (2.0 * y2 * (ee - 1.0) + (4.0 * y2 * (y2 - x2) - s2) / (2.0 * y2 + sa)) / (2.0 * sa)
    hk1 = (kk - ee) / (TWO_PI * sa) + (y2 - x2) * bk / (math.pi * s2)
    hk2 = dz * ((ee - kk) / (TWO_PI * x2 * sa) + bk / (math.pi * s2))
    return hk1, hk2, kp1, kp2


@njit(cache=True)
def h_pair(x1, x2, y1, y2, s2):
    """Full kernel ``(H1, H2)`` at smoothed separation ``s2``."""
    if y2 == 0.0:
        return 0.0, 0.0
    a = s2 + 4.0 * x2 * y2
    sa = math.sqrt(a)
    kk, ee = ellipke_m1(s2 / a)
    h1 = (kk - ee + 2.0 * y2 * (y2 - x2) * ee / s2) / (TWO_PI * sa)
    h2 = (x1 - y1) * (ee - kk + 2.0 * x2 * y2 * ee / s2) / (TWO_PI * x2 * sa)
    return h1, h2


@njit(cache=True)
def lift_pair(x2, s):
    """Axial lift part ``log((1+s)/s) / (4 pi x2)`` at separation ``s``."""
    return math.log1p(1.0 / s) / (FOUR_PI * x2)


@njit(cache=True)
def split_pair(x1, x2, y1, y2, s2):
    """Return ``(K1, K2, L1, R1, R2)``; ``L2`` is identically zero."""
    if y2 == 0.0:
        return 0.0, 0.0, 0.0, 0.0, 0.0
    hk1, hk2, kp1, kp2 = h_minus_k(x1, x2, y1, y2, s2)
    l1 = lift_pair(x2, math.sqrt(s2))
    return kp1, kp2, l1, hk1 - l1, hk2


@njit(cache=True)
def green_pair(x1, x2, y1, y2, s2, coeffs):
    """Green function ``S`` at smoothed separation ``s2``."""
    if x2 == 0.0 or y2 == 0.0:
        return 0.0
    p = 4.0 * x2 * y2
    a = s2 + p
    return math.sqrt(a) * green_bracket(p / a, s2 / a, coeffs) / FOUR_PI


def green_pair_default(x1, x2, y1, y2, s2):
    return green_pair(x1, x2, y1, y2, s2, GREEN_SERIES)
