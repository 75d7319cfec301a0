"""Kernel self-test: quadrature/elliptic agreement, split identity, stream relation, I1 bound."""

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import halfplane_kernel as hk
from . import io as _io

GRID_R = tuple(0.5 + 0.25 * k for k in range(7))
SEPARATIONS = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)
DIRECTIONS = 8

CROSS_TOL = 1e-9
SPLIT_TOL = 1e-12
STREAM_TOL = 1e-9
I1_TOL = 1e-12


@dataclass
class CheckResult:
    name: str
    max_error: float
    tolerance: float
    samples: int
    seconds: float

    @property
    def passed(self):
        return self.max_error <= self.tolerance


def grid_pairs():
    """Cross-agreement pairs.

    One point sits at ``(0, g)`` for g on the radial grid, the other at
    separation s in one of 8 directions; both roles (x anchored, y anchored)
    are used. Pairs whose offset point leaves ``r > 0`` are skipped.
    """
    for g in GRID_R:
        for s in SEPARATIONS:
            for k in range(DIRECTIONS):
                a = 2.0 * math.pi * k / DIRECTIONS
                p = (0.0, g)
                q = (s * math.cos(a), g + s * math.sin(a))
                if q[1] > 0.0:
                    yield p, q
                    yield q, p


def _rel(a, b):
    scale = max(abs(b[0]), abs(b[1]))
    return max(abs(a[0] - b[0]), abs(a[1] - b[1])) / scale if scale > 0 else max(abs(a[0]), abs(a[1]))


def check_cross_agreement(pairs=None):
    t = time.perf_counter()
    worst, n = 0.0, 0
    for x, y in pairs or grid_pairs():
        worst = max(worst, _rel(hk.axisym_kernel_elliptic(x, y), hk.axisym_kernel_quadrature(x, y)))
        n += 1
    return CheckResult("cross_agreement", worst, CROSS_TOL, n, time.perf_counter() - t)


def check_split_identity(pairs=None):
    t = time.perf_counter()
    worst, n = 0.0, 0
    for x, y in pairs or grid_pairs():
        sp = hk.remainder_kernel(x, y)
        worst = max(worst, sp.reconstruction_error())
        n += 1
    return CheckResult("split_identity", worst, SPLIT_TOL, n, time.perf_counter() - t)


def random_pairs(n=100, seed=12345):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x = (rng.uniform(-1, 1), rng.uniform(0.3, 2.5))
        y = (rng.uniform(-1, 1), rng.uniform(0.3, 2.5))
        if math.dist(x, y) > 1e-3:
            out.append((x, y))
    return out


def check_stream_relation(pairs=None):
    t = time.perf_counter()
    worst, n = 0.0, 0
    for x, y in pairs or random_pairs():
        g = hk.green_gradient(x, y)
        h = hk.axisym_kernel_elliptic(x, y)
        worst = max(worst, _rel((g[1], -g[0]), (x[1] * h[0], x[1] * h[1])))
        n += 1
    return CheckResult("stream_relation", worst, STREAM_TOL, n, time.perf_counter() - t)


def check_i1_bound(samples=61):
    """Excess of ``I1(a) a^2 sqrt(a^2 + 4)`` over 2 for a in [1e-3, 1e3]."""
    t = time.perf_counter()
    worst = -math.inf
    for a in np.logspace(-3, 3, samples):
        i1, _ = hk.profile_integrals(a)
        worst = max(worst, i1 * a * a * math.sqrt(a * a + 4.0) - 2.0)
    return CheckResult("i1_bound", max(worst, 0.0), I1_TOL, samples, time.perf_counter() - t)


@contextmanager
def injected_fault(size=1e-6):
    """Perturb the closed-form kernel by a relative ``size`` for the duration."""
    old = hk._ELLIPTIC_FAULT
    hk._ELLIPTIC_FAULT = size
    try:
        yield
    finally:
        hk._ELLIPTIC_FAULT = old


def run_all():
    return [check_cross_agreement(), check_split_identity(), check_stream_relation(), check_i1_bound()]


REPORT_COLUMNS = ("check", "max_error", "tolerance", "samples", "passed", "seconds")


def report_rows(results):
    return [(r.name, r.max_error, r.tolerance, r.samples, "true" if r.passed else "false", r.seconds)
            for r in results]


def write_report(results, path):
    _io.write_csv(path, REPORT_COLUMNS, report_rows(results))
