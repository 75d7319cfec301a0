"""Vectorised numpy versions of the pair sums in ``_numba_kernels``.

Targets are processed in blocks so the (block x N) temporaries stay small.
Summation over sources uses ``np.sum`` along the source axis (pairwise
summation), so results agree with the compiled loops to rounding, not bitwise.
"""

import numpy as np

from .special import GREEN_SERIES, ellipke_m1_array, green_bracket_array

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi
_BLOCK_ELEMS = 1 << 20


def _blocks(nt, ns):
    step = max(1, _BLOCK_ELEMS // max(ns, 1))
    for start in range(0, nt, step):
        yield slice(start, min(nt, start + step))


def _h_block(x1, x2, y1, y2, s2):
    a = s2 + 4.0 * x2 * y2
    sa = np.sqrt(a)
    kk, ee = ellipke_m1_array(s2 / a)
    h1 = (kk - ee + 2.0 * y2 * (y2 - x2) * ee / s2) / (TWO_PI * sa)
    h2 = (x1 - y1) * (ee - kk + 2.0 * x2 * y2 * ee / s2) / (TWO_PI * x2 * sa)
    dead = y2 == 0.0
    if np.any(dead):
        h1 = np.where(dead, 0.0, h1)
        h2 = np.where(dead, 0.0, h2)
    return h1, h2


def velocity_targets(tz, tr, sz, sr, g, delta2, out):
    ns = sz.shape[0]
    if ns == 0:
        out[:] = 0.0
        return
    y1 = sz[None, :]
    y2 = sr[None, :]
    for blk in _blocks(tz.shape[0], ns):
        x1 = tz[blk, None]
        x2 = tr[blk, None]
        s2 = (x1 - y1) ** 2 + (x2 - y2) ** 2 + delta2
        with np.errstate(divide="ignore", invalid="ignore"):
            h1, h2 = _h_block(x1, x2, y1, y2, s2)
        live = g != 0.0
        out[blk, 0] = np.sum(h1[:, live] * g[live], axis=1)
        out[blk, 1] = np.sum(h2[:, live] * g[live], axis=1)


def velocity_symmetric(z, r, g, delta2, out):
    velocity_targets(z, r, z, r, g, delta2, out)


def split_parts(x1, x2, y1, y2, s2):
    """Arrays ``(K1, K2, L1, R1, R2)`` for broadcastable inputs."""
    dz = x1 - y1
    kp1 = (y2 - x2) / (TWO_PI * s2)
    kp2 = dz / (TWO_PI * s2)
    a = s2 + 4.0 * x2 * y2
    sa = np.sqrt(a)
    kk, ee = ellipke_m1_array(s2 / a)
    bk = (2.0 * y2 * (ee - 1.0) + (4.0 * y2 * (y2 - x2) - s2) / (2.0 * y2 + sa)) / (2.0 * sa)
    hk1 = (kk - ee) / (TWO_PI * sa) + (y2 - x2) * bk / (np.pi * s2)
    hk2 = dz * ((ee - kk) / (TWO_PI * x2 * sa) + bk / (np.pi * s2))
    l1 = np.log1p(1.0 / np.sqrt(s2)) / (FOUR_PI * x2)
    parts = [kp1, kp2, l1, hk1 - l1, hk2]
    dead = np.broadcast_to(y2 == 0.0, np.shape(kp1))
    if np.any(dead):
        parts = [np.where(dead, 0.0, p) for p in parts]
    return parts


def split_targets(tz, tr, sz, sr, g, delta2, out):
    y1 = sz[None, :]
    y2 = sr[None, :]
    for blk in _blocks(tz.shape[0], sz.shape[0]):
        x1 = tz[blk, None]
        x2 = tr[blk, None]
        s2 = (x1 - y1) ** 2 + (x2 - y2) ** 2 + delta2
        parts = split_parts(x1, x2, y1, y2, s2)
        for c, p in enumerate(parts):
            out[blk, c] = np.sum(p * g, axis=1)


def green_block(x1, x2, y1, y2, s2):
    p = 4.0 * x2 * y2
    a = s2 + p
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.sqrt(a) * green_bracket_array(np.broadcast_to(p / a, np.shape(a)),
                                               np.broadcast_to(s2 / a, np.shape(a))) / FOUR_PI
    return np.where(p == 0.0, 0.0, val)


def green_double_sum(z, r, g, delta2, coeffs=GREEN_SERIES):
    total = 0.0
    for blk in _blocks(z.shape[0], z.shape[0]):
        x1 = z[blk, None]
        x2 = r[blk, None]
        s2 = (x1 - z[None, :]) ** 2 + (x2 - r[None, :]) ** 2 + delta2
        total += float(np.sum(g[blk] * np.sum(green_block(x1, x2, z[None, :], r[None, :], s2) * g, axis=1)))
    return total


def lift_double_sum(z, r, g, delta2):
    total = 0.0
    for blk in _blocks(z.shape[0], z.shape[0]):
        d = np.sqrt((z[blk, None] - z[None, :]) ** 2 + (r[blk, None] - r[None, :]) ** 2 + delta2)
        rows = np.sum(np.log1p(1.0 / d) * g, axis=1) / (FOUR_PI * r[blk])
        total += float(np.sum(g[blk] * rows))
    return total


def disk_weights(cz, cr, z, r, g, radius):
    out = np.empty(cz.shape[0])
    for blk in _blocks(cz.shape[0], z.shape[0]):
        d2 = (z[None, :] - cz[blk, None]) ** 2 + (r[None, :] - cr[blk, None]) ** 2
        out[blk] = np.sum(np.where(d2 <= radius * radius, g, 0.0), axis=1)
    return out
