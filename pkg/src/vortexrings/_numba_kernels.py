"""O(N^2) pair sums, compiled with numba.

Two summation strategies for the velocity:

* ``velocity_targets`` parallelises over targets; each target sums its
  sources in index order, so the result is bit-identical for any thread
  count (the deterministic-reduction mode).
* ``velocity_symmetric`` is serial and visits each unordered pair once,
  sharing the elliptic integrals between ``H(x_i, x_j)`` and ``H(x_j, x_i)``.
  About twice as fast on a single core.
"""

import math

import numpy as np

from ._backend import njit, prange
from ._pair import TWO_PI, green_pair, h_pair, lift_pair, split_pair
from .special import ellipke_m1


@njit(cache=True, parallel=True)
def velocity_targets(tz, tr, sz, sr, g, delta2, out):
    nt = tz.shape[0]
    ns = sz.shape[0]
    for i in prange(nt):
        x1 = tz[i]
        x2 = tr[i]
        u1 = 0.0
        u2 = 0.0
        for j in range(ns):
            gj = g[j]
            if gj == 0.0:
                continue
            dz = x1 - sz[j]
            dr = x2 - sr[j]
            h1, h2 = h_pair(x1, x2, sz[j], sr[j], dz * dz + dr * dr + delta2)
            u1 += gj * h1
            u2 += gj * h2
        out[i, 0] = u1
        out[i, 1] = u2


@njit(cache=True)
def velocity_symmetric(z, r, g, delta2, out):
    n = z.shape[0]
    for i in range(n):
        out[i, 0] = 0.0
        out[i, 1] = 0.0
    for i in range(n):
        zi = z[i]
        ri = r[i]
        gi = g[i]
        # self term: s2 = delta2, H2 vanishes
        if ri > 0.0 and delta2 > 0.0:
            a = delta2 + 4.0 * ri * ri
            kk, ee = ellipke_m1(delta2 / a)
            out[i, 0] += gi * (kk - ee) / (TWO_PI * math.sqrt(a))
        for j in range(i + 1, n):
            zj = z[j]
            rj = r[j]
            gj = g[j]
            dz = zi - zj
            dr = ri - rj
            s2 = dz * dz + dr * dr + delta2
            p = 4.0 * ri * rj
            if p == 0.0:
                continue
            a = s2 + p
            sa = math.sqrt(a)
            kk, ee = ellipke_m1(s2 / a)
            cross = 0.5 * p * ee / s2
            c = TWO_PI * sa
            # target i, source j
            out[i, 0] += gj * (kk - ee + 2.0 * rj * (rj - ri) * ee / s2) / c
            out[i, 1] += gj * dz * (ee - kk + cross) / (c * ri)
            # target j, source i
            out[j, 0] += gi * (kk - ee + 2.0 * ri * (ri - rj) * ee / s2) / c
            out[j, 1] -= gi * dz * (ee - kk + cross) / (c * rj)


@njit(cache=True, parallel=True)
def split_targets(tz, tr, sz, sr, g, delta2, out):
    """Per-target sums of the planar, lift and remainder parts.

    ``out`` has shape (nt, 5): K1, K2, L1, R1, R2.
    """
    nt = tz.shape[0]
    ns = sz.shape[0]
    for i in prange(nt):
        x1 = tz[i]
        x2 = tr[i]
        a0 = 0.0
        a1 = 0.0
        a2 = 0.0
        a3 = 0.0
        a4 = 0.0
        for j in range(ns):
            gj = g[j]
            dz = x1 - sz[j]
            dr = x2 - sr[j]
            k1, k2, l1, r1, r2 = split_pair(x1, x2, sz[j], sr[j], dz * dz + dr * dr + delta2)
            a0 += gj * k1
            a1 += gj * k2
            a2 += gj * l1
            a3 += gj * r1
            a4 += gj * r2
        out[i, 0] = a0
        out[i, 1] = a1
        out[i, 2] = a2
        out[i, 3] = a3
        out[i, 4] = a4


@njit(cache=True)
def green_double_sum(z, r, g, delta2, coeffs):
    """``sum_{j,k} g_j g_k S_delta(x_j, x_k)``, diagonal included."""
    n = z.shape[0]
    diag = 0.0
    off = 0.0
    for i in range(n):
        gi = g[i]
        diag += gi * gi * green_pair(z[i], r[i], z[i], r[i], delta2, coeffs)
        row = 0.0
        for j in range(i + 1, n):
            dz = z[i] - z[j]
            dr = r[i] - r[j]
            row += g[j] * green_pair(z[i], r[i], z[j], r[j], dz * dz + dr * dr + delta2, coeffs)
        off += gi * row
    return diag + 2.0 * off


@njit(cache=True)
def lift_double_sum(z, r, g, delta2):
    """``sum_j g_j / (4 pi r_j) sum_k g_k log((1+d)/d)`` with smoothed ``d``."""
    n = z.shape[0]
    total = 0.0
    for i in range(n):
        row = 0.0
        for j in range(n):
            dz = z[i] - z[j]
            dr = r[i] - r[j]
            row += g[j] * lift_pair(r[i], math.sqrt(dz * dz + dr * dr + delta2))
        total += g[i] * row
    return total


@njit(cache=True)
def disk_weights(cz, cr, z, r, g, radius):
    """Weight enclosed by the closed disk of given radius around each candidate."""
    nc = cz.shape[0]
    n = z.shape[0]
    rad2 = radius * radius
    out = np.zeros(nc)
    for c in range(nc):
        acc = 0.0
        for j in range(n):
            dz = z[j] - cz[c]
            dr = r[j] - cr[c]
            if dz * dz + dr * dr <= rad2:
                acc += g[j]
        out[c] = acc
    return out
