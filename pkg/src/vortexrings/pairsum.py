"""Backend dispatch for the O(N^2) pair sums.

All functions take contiguous float64 arrays. ``delta`` is the blob
smoothing length; ``delta = 0`` gives the exact (singular) kernels and must
not be used with coincident targets and sources.
"""

import numpy as np

from . import _backend
from .special import GREEN_SERIES

if _backend.HAVE_NUMBA:
    from . import _numba_kernels as _k
else:
    from . import _numpy_kernels as _k


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def velocity(tz, tr, sz, sr, g, delta, deterministic=False):
    """Induced velocity at targets, shape (nt, 2)."""
    tz, tr, sz, sr, g = map(_f64, (tz, tr, sz, sr, g))
    out = np.zeros((tz.shape[0], 2))
    if tz.shape[0] == 0 or sz.shape[0] == 0:
        return out
    _k.velocity_targets(tz, tr, sz, sr, g, float(delta) ** 2, out)
    return out


def self_velocity(z, r, g, delta, deterministic=False):
    """Velocity of every particle induced by all particles (self term included).

    Without ``deterministic`` and on a single thread the symmetric pair loop
    is used; its summation order differs from the per-target loop, so the two
    agree to rounding only.
    """
    z, r, g = map(_f64, (z, r, g))
    out = np.zeros((z.shape[0], 2))
    if z.shape[0] == 0:
        return out
    if deterministic or _backend.get_threads() > 1:
        _k.velocity_targets(z, r, z, r, g, float(delta) ** 2, out)
    else:
        _k.velocity_symmetric(z, r, g, float(delta) ** 2, out)
    return out


def split_velocity(tz, tr, sz, sr, g, delta):
    """Planar/lift/remainder parts at targets, shape (nt, 5): K1, K2, L1, R1, R2."""
    tz, tr, sz, sr, g = map(_f64, (tz, tr, sz, sr, g))
    out = np.zeros((tz.shape[0], 5))
    if tz.shape[0] == 0 or sz.shape[0] == 0:
        return out
    _k.split_targets(tz, tr, sz, sr, g, float(delta) ** 2, out)
    return out


def green_double_sum(z, r, g, delta):
    z, r, g = map(_f64, (z, r, g))
    if z.shape[0] == 0:
        return 0.0
    return float(_k.green_double_sum(z, r, g, float(delta) ** 2, GREEN_SERIES))


def lift_double_sum(z, r, g, delta):
    z, r, g = map(_f64, (z, r, g))
    if z.shape[0] == 0:
        return 0.0
    return float(_k.lift_double_sum(z, r, g, float(delta) ** 2))


def disk_weights(cz, cr, z, r, g, radius):
    cz, cr, z, r, g = map(_f64, (cz, cr, z, r, g))
    return np.asarray(_k.disk_weights(cz, cr, z, r, g, float(radius)))
