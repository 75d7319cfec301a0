"""Globally adaptive 7/15-point Gauss-Kronrod quadrature for vector integrands."""

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

# 15 abscissae on [-1, 1] and the matching weights
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[13, 11, 9]] = _WG[:3]


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    max_depth: int = 60

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if int(self.max_depth) < 1:
            raise ValueError("max_depth must be >= 1")

    def tighter(self, factor=10.0):
        return QuadratureSpec(self.abs_tol / factor, self.rel_tol / factor, self.max_depth)


DEFAULT_SPEC = QuadratureSpec()


def _rules(f, a, b):
    """Kronrod value and |K - G| error for each interval in arrays a, b."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    y = np.asarray(f(x), dtype=float)
    y = y.reshape(-1, a.size, 15)
    kron = (y @ _KW) * half
    gauss = (y @ _GW) * half
    return kron, np.max(np.abs(kron - gauss), axis=0)


def integrate(f, breakpoints, spec=DEFAULT_SPEC):
    """Integrate ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    ``f`` maps a 1-d array of abscissae to an array of shape ``(n,)`` or
    ``(m, n)``. Returns ``(value, error_estimate)`` where ``value`` has shape
    ``(m,)`` (``m = 1`` for scalar integrands).

    Raises ConvergenceError when an interval that must be refined is already
    at ``spec.max_depth``.
    """
    pts = np.asarray(breakpoints, dtype=float)
    a = pts[:-1]
    b = pts[1:]
    vals, errs = _rules(f, a, b)
    heap = []
    counter = 0
    for i in range(a.size):
        heap.append((-errs[i], counter, a[i], b[i], 0, vals[:, i]))
        counter += 1
    heapq.heapify(heap)
    total = vals.sum(axis=1)
    err = float(errs.sum())

    while True:
        tol = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))))
        if err <= tol:
            break
        neg_e, _, lo, hi, depth, v = heapq.heappop(heap)
        if depth >= spec.max_depth:
            total = np.sum([item[5] for item in heap] + [v], axis=0)
            raise ConvergenceError(
                f"quadrature tolerance {tol:.3g} not reached at depth {depth}",
                estimate=total, error=err)
        c = 0.5 * (lo + hi)
        kv, ke = _rules(f, np.array([lo, c]), np.array([c, hi]))
        for k, (l_, h_) in enumerate(((lo, c), (c, hi))):
            heapq.heappush(heap, (-ke[k], counter, l_, h_, depth + 1, kv[:, k]))
            counter += 1
        total = total - v + kv[:, 0] + kv[:, 1]
        err = err + neg_e + float(ke.sum())

    # re-sum from the leaves to drop running-sum drift
    total = np.sum([item[5] for item in heap], axis=0)
    err = float(sum(-item[0] for item in heap))
    return total, err


def angular_breakpoints(theta_star, ratio=4.0):
    """Breakpoints on [0, pi] clustered geometrically near 0 below ``theta_star``."""
    pts = [0.0]
    t = float(theta_star)
    if 0.0 < t < 0.5:
        while t < math.pi / ratio:
            pts.append(t)
            t *= ratio
    pts.append(math.pi)
    return np.array(pts)
