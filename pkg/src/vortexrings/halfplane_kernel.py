"""Kernels of the meridional half-plane: velocity kernel H and its split.

Points are ``(z, r)`` pairs in the half-plane ``r > 0``. ``H(x, y)`` maps a
vorticity weight at ``y`` to a velocity at ``x``; it splits as

    H(x, y) = K(x - y) + L(x, y) + R(x, y)

with ``K`` the planar point-vortex kernel, ``L`` a purely axial logarithmic
term and ``R`` bounded. Each kernel is available both by adaptive angular
quadrature (slow, tolerance-controlled) and, where useful, in closed form via
complete elliptic integrals.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _numpy_kernels
from ._pair import green_pair_default, h_pair
from .errors import DomainError
from .quadrature import DEFAULT_SPEC, angular_breakpoints, integrate

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi

# multiplicative perturbation of the elliptic path; only the self-test touches it
_ELLIPTIC_FAULT = 0.0


class HalfPlanePoint(NamedTuple):
    z: float
    r: float


class PlaneVector(NamedTuple):
    c1: float
    c2: float


@dataclass(frozen=True)
class KernelSplit:
    k_part: PlaneVector
    l_part: PlaneVector
    r_part: PlaneVector
    total: PlaneVector

    def reconstruction_error(self):
        return max(abs(self.k_part[i] + self.l_part[i] + self.r_part[i] - self.total[i])
                   for i in range(2))


def _pt(p):
    z, r = p
    return float(z), float(r)


def _separation(x, y):
    d = math.hypot(x[0] - y[0], x[1] - y[1])
    if d == 0.0:
        raise DomainError(f"coincident points {x} and {y}")
    return d


def _check_target(x):
    if not x[1] > 0.0:
        raise DomainError(f"target must lie in r > 0, got r = {x[1]}")


def planar_kernel(d):
    """Planar Biot-Savart kernel ``(-d2, d1) / (2 pi |d|^2)``."""
    d1, d2 = _pt(d)
    n2 = d1 * d1 + d2 * d2
    if n2 == 0.0:
        raise DomainError("planar kernel is singular at zero separation")
    return PlaneVector(-d2 / (TWO_PI * n2), d1 / (TWO_PI * n2))


def lift_kernel(x, y):
    """Axial lift part ``L(x, y) = log((1 + |x-y|)/|x-y|) / (4 pi x2) e_z``."""
    x, y = _pt(x), _pt(y)
    _check_target(x)
    s = _separation(x, y)
    return PlaneVector(math.log1p(1.0 / s) / (FOUR_PI * x[1]), 0.0)


def _half_angle_sq(theta):
    s = np.sin(0.5 * theta)
    return 2.0 * s * s  # 1 - cos(theta)


def axisym_kernel_quadrature(x, y, q=DEFAULT_SPEC):
    """``H(x, y)`` by adaptive quadrature of the angular integrals.

    Raises DomainError for coincident points or ``x.r <= 0``, and
    ConvergenceError if ``q`` cannot be met within ``q.max_depth``.
    """
    x, y = _pt(x), _pt(y)
    _check_target(x)
    if y[1] < 0.0:
        raise DomainError(f"source must have r >= 0, got {y[1]}")
    rho = _separation(x, y)
    if y[1] == 0.0:
        return PlaneVector(0.0, 0.0)
    x1, x2 = x
    y1, y2 = y
    p = x2 * y2

    def f(theta):
        omc = _half_angle_sq(theta)
        den = (rho * rho + 2.0 * p * omc) ** 1.5
        f1 = y2 * ((y2 - x2) + x2 * omc) / den
        f2 = y2 * (x1 - y1) * np.cos(theta) / den
        return np.stack([f1, f2])

    val, _ = integrate(f, angular_breakpoints(rho / math.sqrt(p)), q)
    return PlaneVector(float(val[0]) / TWO_PI, float(val[1]) / TWO_PI)


def axisym_kernel_elliptic(x, y):
    """``H(x, y)`` in closed form through complete elliptic integrals."""
    x, y = _pt(x), _pt(y)
    _check_target(x)
    if y[1] < 0.0:
        raise DomainError(f"source must have r >= 0, got {y[1]}")
    rho = _separation(x, y)
    if y[1] == 0.0:
        return PlaneVector(0.0, 0.0)
    h1, h2 = h_pair(x[0], x[1], y[0], y[1], rho * rho)
    f = 1.0 + _ELLIPTIC_FAULT
    return PlaneVector(float(h1) * f, float(h2) * f)


def axisym_kernel_elliptic_array(x1, x2, y1, y2, delta=0.0):
    """Vectorised closed-form ``H`` (optionally smoothed by ``delta``)."""
    x1, x2, y1, y2 = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x1, x2, y1, y2)))
    s2 = (x1 - y1) ** 2 + (x2 - y2) ** 2 + delta * delta
    with np.errstate(divide="ignore", invalid="ignore"):
        h1, h2 = _numpy_kernels._h_block(x1, x2, y1, y2, s2)
    f = 1.0 + _ELLIPTIC_FAULT
    return h1 * f, h2 * f


def remainder_kernel(x, y, q=DEFAULT_SPEC, method="quadrature"):
    """Split ``H = K + L + R``; ``R`` is what is left after K and L.

    ``method`` selects how the total ``H`` is evaluated ("quadrature" or
    "elliptic").
    """
    x, y = _pt(x), _pt(y)
    _check_target(x)
    if not y[1] > 0.0:
        raise DomainError("remainder kernel needs a source with r > 0")
    if method == "quadrature":
        total = axisym_kernel_quadrature(x, y, q)
    elif method == "elliptic":
        total = axisym_kernel_elliptic(x, y)
    else:
        raise ValueError(f"unknown method {method!r}")
    k = planar_kernel((x[0] - y[0], x[1] - y[1]))
    l_ = lift_kernel(x, y)
    r = PlaneVector(total[0] - k[0] - l_[0], total[1] - k[1] - l_[1])
    return KernelSplit(k, l_, r, total)


def remainder_bound_shape(x2, y2):
    """Right-hand side of the remainder bound without its constant C0."""
    p = x2 * y2
    return (1.0 + x2 + math.sqrt(p) * (1.0 + abs(math.log(p)))) / (x2 * x2)


def green_function(x, y, q=DEFAULT_SPEC, delta=0.0):
    """Stream-function Green function ``S(x, y)`` by quadrature.

    A positive ``delta`` replaces ``|x-y|^2`` by ``|x-y|^2 + delta^2`` (the
    blob-smoothed Green function; then ``x == y`` is allowed).
    """
    x, y = _pt(x), _pt(y)
    s2 = (x[0] - y[0]) ** 2 + (x[1] - y[1]) ** 2 + delta * delta
    if s2 == 0.0:
        raise DomainError(f"coincident points {x} and {y}")
    p = x[1] * y[1]
    if p == 0.0:
        return 0.0

    def f(theta):
        return np.cos(theta) / np.sqrt(s2 + 2.0 * p * _half_angle_sq(theta))

    val, _ = integrate(f, angular_breakpoints(math.sqrt(s2 / abs(p))), q)
    return p * float(val[0]) / TWO_PI


def green_function_elliptic(x, y, delta=0.0):
    """Closed-form ``S``; with ``delta > 0`` the separation is smoothed."""
    x, y = _pt(x), _pt(y)
    s2 = (x[0] - y[0]) ** 2 + (x[1] - y[1]) ** 2 + delta * delta
    if s2 == 0.0:
        raise DomainError("Green function diverges at coincident points")
    return float(green_pair_default(x[0], x[1], y[0], y[1], s2))


def green_gradient(x, y, q=DEFAULT_SPEC):
    """``(dS/dx1, dS/dx2)`` by quadrature of the two angular integrals."""
    x, y = _pt(x), _pt(y)
    _check_target(x)
    if not y[1] > 0.0:
        raise DomainError("green_gradient needs a source with r > 0")
    rho = _separation(x, y)
    x1, x2 = x
    y1, y2 = y
    p = x2 * y2

    def f(theta):
        omc = _half_angle_sq(theta)
        den = (rho * rho + 2.0 * p * omc) ** 1.5
        g1 = (y1 - x1) * np.cos(theta) / den
        g2 = ((y2 - x2) + x2 * omc) / den
        return np.stack([g1, g2])

    val, _ = integrate(f, angular_breakpoints(rho / math.sqrt(p)), q)
    return PlaneVector(p * float(val[0]) / TWO_PI, p * float(val[1]) / TWO_PI)


def profile_integrals(a, q=DEFAULT_SPEC):
    """The angular integrals ``(I1(a), I2(a))`` entering the energy estimate."""
    a = float(a)
    if not a > 0.0:
        raise DomainError(f"profile integrals need a > 0, got {a}")

    def f(theta):
        omc = _half_angle_sq(theta)
        den = (a * a + 2.0 * omc) ** 1.5
        return np.stack([np.cos(theta) / den, omc / den])

    val, _ = integrate(f, angular_breakpoints(a), q)
    return float(val[0]), float(val[1])


def i1_upper_bound(a):
    return 2.0 / (a * a * math.sqrt(a * a + 4.0))


def i2_bound_shape(a):
    """``I2`` bound without its additive constant."""
    return 0.5 * math.log(2.0 + math.sqrt(a * a + 4.0)) - 0.5 * math.log(a)
