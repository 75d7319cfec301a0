"""Particle representation of the vorticity ``omega dz dr``.

Each particle carries a weight ``gamma`` (the transported value of
``omega dz dr``) that never changes; only positions move. Rings are laid
out on a square grid clipped to the core disk and normalised so that the
weights of ring ``i`` sum to ``a_i / |log eps|``.
"""

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import io as _io
from .errors import ConfigurationError, DomainError
from .halfplane_kernel import HalfPlanePoint

PROFILES = ("uniform-disk", "truncated-gaussian")
SNAPSHOT_COLUMNS = ("ring_id", "z", "r", "gamma")

# gaussian profile width relative to the core radius
GAUSSIAN_WIDTH = 0.5


class Particle(NamedTuple):
    position: HalfPlanePoint
    gamma: float
    ring_id: int


@dataclass(frozen=True)
class RingSpec:
    """One vortex ring: core disk of radius ``epsilon`` around ``center``.

    ``resolution`` is the number of particles across the core diameter and
    ``density_bound`` the constant M in ``|omega| <= M/(eps^2 |log eps|)``.
    """

    center: HalfPlanePoint
    epsilon: float
    intensity: float = 1.0
    profile: str = "uniform-disk"
    resolution: int = 16
    density_bound: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", HalfPlanePoint(float(self.center[0]), float(self.center[1])))
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigurationError(f"ring core radius must lie in (0, 1), got {self.epsilon}")
        if not self.center.r > self.epsilon:
            raise ConfigurationError(
                f"ring at {tuple(self.center)} with core {self.epsilon} touches the axis r = 0")
        if self.intensity == 0.0 or not math.isfinite(self.intensity):
            raise ConfigurationError("ring intensity must be finite and nonzero")
        if self.profile not in PROFILES:
            raise ConfigurationError(f"unknown profile {self.profile!r}; choose from {PROFILES}")
        if int(self.resolution) != self.resolution or self.resolution < 4:
            raise ConfigurationError("resolution must be an integer >= 4")
        if not self.density_bound > 0.0:
            raise ConfigurationError("density_bound must be positive")

    @property
    def cell(self):
        return 2.0 * self.epsilon / self.resolution


class VortexSystem:
    """Particle ensemble with immutable weights and ring membership.

    ``z`` and ``r`` are owned float arrays; ``gamma`` and ``ring_id`` are
    read-only views shared between copies.
    """

    def __init__(self, z, r, gamma, ring_id, epsilon, time=0.0, rings=()):
        self.z = np.array(z, dtype=np.float64)
        self.r = np.array(r, dtype=np.float64)
        g = np.array(gamma, dtype=np.float64)
        rid = np.array(ring_id, dtype=np.int64)
        if not (self.z.shape == self.r.shape == g.shape == rid.shape) or self.z.ndim != 1:
            raise ValueError("z, r, gamma and ring_id must be 1-d arrays of equal length")
        g.flags.writeable = False
        rid.flags.writeable = False
        self.gamma = g
        self.ring_id = rid
        self.epsilon = float(epsilon)
        self.time = float(time)
        self.rings = tuple(rings)

    @classmethod
    def _share(cls, other, z, r, time):
        new = cls.__new__(cls)
        new.z = np.array(z, dtype=np.float64)
        new.r = np.array(r, dtype=np.float64)
        new.gamma = other.gamma
        new.ring_id = other.ring_id
        new.epsilon = other.epsilon
        new.time = float(time)
        new.rings = other.rings
        return new

    def with_positions(self, z, r, time):
        """New system sharing weights and metadata, with given positions and clock."""
        return VortexSystem._share(self, z, r, time)

    def copy(self):
        return VortexSystem._share(self, self.z, self.r, self.time)

    @property
    def ring_count(self):
        if self.rings:
            return len(self.rings)
        return int(self.ring_id.max()) + 1 if self.size else 0

    @property
    def size(self):
        return int(self.z.shape[0])

    def __len__(self):
        return self.size

    @property
    def log_eps(self):
        return abs(math.log(self.epsilon))

    @property
    def particles(self):
        return [Particle(HalfPlanePoint(float(z), float(r)), float(g), int(i))
                for z, r, g, i in zip(self.z, self.r, self.gamma, self.ring_id)]

    def ring_mask(self, i):
        return self.ring_id == i

    def ring_mass(self, i):
        return math.fsum(self.gamma[self.ring_id == i])

    def total_mass(self):
        return math.fsum(self.gamma)

    def subsystem(self, i):
        """Ring ``i`` alone (positions copied, weights shared by value)."""
        m = self.ring_mask(i)
        rings = (self.rings[i],) if self.rings else ()
        return VortexSystem(self.z[m], self.r[m], self.gamma[m], np.zeros(int(m.sum()), dtype=np.int64),
                            self.epsilon, self.time, rings)


def _grid_offsets(ring):
    n = int(ring.resolution)
    h = ring.cell
    k = h * (np.arange(n) - 0.5 * (n - 1))
    dz, dr = np.meshgrid(k, k, indexing="ij")
    dz = dz.ravel()
    dr = dr.ravel()
    keep = np.hypot(dz, dr) < ring.epsilon * (1.0 - 1e-9)
    return dz[keep], dr[keep], h * h


def _profile_values(ring, dz, dr):
    if ring.profile == "uniform-disk":
        return np.ones_like(dz)
    s = GAUSSIAN_WIDTH * ring.epsilon
    return np.exp(-(dz * dz + dr * dr) / (2.0 * s * s))


def _exact_normalise(w, target):
    """Scale ``w`` so that ``math.fsum`` of it equals ``target`` exactly."""
    w = w * (target / math.fsum(w))
    j = int(np.argmax(np.abs(w)))
    for _ in range(4):
        if math.fsum(w) == target:
            break
        w[j] += math.fsum([target, *(-w)])  # correctly rounded target - sum(w)
    return w


def check_separation(rings, D, policy="error"):
    """Check ``min r_i > 2D`` and ``|r_i - r_j| >= 2D``; policy: error, warn or off."""
    if policy == "off" or D is None:
        return []
    problems = []
    for i, ring in enumerate(rings):
        if not ring.center.r > 2.0 * D:
            problems.append(f"ring {i} radius {ring.center.r} is not above 2D = {2 * D}")
    for i in range(len(rings)):
        for j in range(i + 1, len(rings)):
            if abs(rings[i].center.r - rings[j].center.r) < 2.0 * D:
                problems.append(f"rings {i} and {j} have radii closer than 2D = {2 * D}")
    if problems:
        msg = "; ".join(problems)
        if policy == "error":
            raise ConfigurationError(msg)
        warnings.warn(msg, stacklevel=2)
    return problems


def build_initial_data(rings, epsilon, separation_D=None, separation_policy="error"):
    """Lay out particles for every ring and normalise the intensities.

    Raises ConfigurationError for overlapping cores, cores touching the
    axis, a violated density bound, or (with ``separation_D`` set and policy
    "error") a violated radius separation.
    """
    if not 0.0 < epsilon < 1.0:
        raise ConfigurationError(f"epsilon must lie in (0, 1), got {epsilon}")
    rings = tuple(rings)
    if not rings:
        raise ConfigurationError("at least one ring is required")
    for i in range(len(rings)):
        for j in range(i + 1, len(rings)):
            a, b = rings[i], rings[j]
            if math.dist(a.center, b.center) < a.epsilon + b.epsilon:
                raise ConfigurationError(f"rings {i} and {j} have overlapping cores")
    check_separation(rings, separation_D, separation_policy)

    log_eps = abs(math.log(epsilon))
    zs, rs, gs, ids = [], [], [], []
    for i, ring in enumerate(rings):
        dz, dr, area = _grid_offsets(ring)
        w = _profile_values(ring, dz, dr)
        w = _exact_normalise(w, ring.intensity / log_eps)
        peak = float(np.max(np.abs(w))) / area
        limit = ring.density_bound / (ring.epsilon ** 2 * abs(math.log(ring.epsilon)))
        if peak > limit:
            raise ConfigurationError(
                f"ring {i}: peak density {peak:.6g} exceeds M/(eps^2 |log eps|) = {limit:.6g}")
        zs.append(ring.center.z + dz)
        rs.append(ring.center.r + dr)
        gs.append(w)
        ids.append(np.full(dz.shape, i, dtype=np.int64))
    return VortexSystem(np.concatenate(zs), np.concatenate(rs), np.concatenate(gs),
                        np.concatenate(ids), epsilon, 0.0, rings)


def integrate_observable(system, f):
    """Particle quadrature ``sum_j gamma_j f(x_j)`` of ``int f omega dz dr``."""
    return math.fsum(g * f(HalfPlanePoint(float(z), float(r)))
                     for z, r, g in zip(system.z, system.r, system.gamma))


def tail_mass(system, center_r, h):
    """Weight of particles with ``|r - center_r| > h``."""
    if h < 0:
        raise DomainError("h must be non-negative")
    return math.fsum(system.gamma[np.abs(system.r - center_r) > h])


@dataclass(frozen=True)
class MollifierSpec:
    """Smooth cutoff: ``W = 1`` on ``|s| <= R``, ``0`` beyond ``R + h``."""

    R: float
    h: float
    C: float = 30.0 / 16.0

    def __post_init__(self):
        if not (self.R > 0 and self.h > 0):
            raise ConfigurationError("mollifier needs R > 0 and h > 0")
        if self.C < 30.0 / 16.0:
            raise ConfigurationError("C is below the quintic profile's derivative bound 30/16")

    # bound on |W''| * h^2 for the quintic profile
    second_derivative_constant = 10.0 / math.sqrt(3.0)


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def mollifier_W(spec, s):
    t = (np.abs(np.asarray(s, dtype=float)) - spec.R) / spec.h
    out = 1.0 - _smoothstep(t)
    return float(out) if np.ndim(out) == 0 else out


def mollifier_W_prime(spec, s):
    s = np.asarray(s, dtype=float)
    t = (np.abs(s) - spec.R) / spec.h
    inside = (t > 0.0) & (t < 1.0)
    d = np.where(inside, -30.0 * t * t * (1.0 - t) ** 2 / spec.h, 0.0) * np.sign(s)
    return float(d) if np.ndim(d) == 0 else d


def mollified_tail(system, center_r, spec):
    """``sum_j gamma_j (1 - W(r_j - center_r))``, a smooth version of ``tail_mass``."""
    w = mollifier_W(spec, system.r - center_r)
    return math.fsum(system.gamma * (1.0 - np.asarray(w)))


def _bump(u):
    return np.where(u < 1.0, (1.0 - u) ** 2, 0.0)  # (1 - rho^2/b^2)^2, C^1 at the edge


# integral of the bump over the plane, per bandwidth^2
BUMP_NORMALIZATION = math.pi / 3.0


def reconstruct_density(system, x, bandwidth):
    """Kernel-density estimate of ``omega`` at ``x``."""
    if not bandwidth > 0:
        raise DomainError("bandwidth must be positive")
    if system.size == 0:
        return 0.0
    u = ((system.z - x[0]) ** 2 + (system.r - x[1]) ** 2) / (bandwidth * bandwidth)
    return math.fsum(system.gamma * _bump(u)) / (BUMP_NORMALIZATION * bandwidth * bandwidth)


def max_density(system, bandwidth):
    """Largest reconstructed density over the particle positions."""
    return max((abs(reconstruct_density(system, (z, r), bandwidth)) for z, r in zip(system.z, system.r)),
               default=0.0)


def snapshot_rows(system):
    return [(int(i), float(z), float(r), float(g))
            for i, z, r, g in zip(system.ring_id, system.z, system.r, system.gamma)]


def write_snapshot(system, path):
    _io.write_csv(path, SNAPSHOT_COLUMNS, snapshot_rows(system))


def read_snapshot(path, epsilon, time=0.0, rings=()):
    header, rows = _io.read_csv(path)
    if tuple(header) != SNAPSHOT_COLUMNS:
        raise ValueError(f"unexpected snapshot header {header}")
    ids = [int(row[0]) for row in rows]
    z, r, g = ([float(row[k]) for row in rows] for k in (1, 2, 3))
    return VortexSystem(z, r, g, ids, epsilon, time, rings)
