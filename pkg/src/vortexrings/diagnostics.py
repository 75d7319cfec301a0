"""Functionals of a particle snapshot and the recorded time series."""

import math
from dataclasses import dataclass, field

import numpy as np

from . import io as _io
from . import pairsum
from .errors import DomainError
from .halfplane_kernel import HalfPlanePoint, PlaneVector, green_function
from .quadrature import DEFAULT_SPEC

BASE_COLUMNS = ("t", "B1", "B2", "I_axial", "J_central", "M0", "M2", "E", "R_t", "q1", "q2", "fraction")
EXTENT_COLUMNS = ("z_min", "z_max", "r_min", "r_max")


def _mass(system):
    m = math.fsum(system.gamma)
    if m == 0.0:
        raise DomainError("total weight is zero")
    return m


def center_of_vorticity(system):
    m = _mass(system)
    return PlaneVector(math.fsum(system.gamma * system.z) / m, math.fsum(system.gamma * system.r) / m)


def axial_moment(system):
    b2 = center_of_vorticity(system)[1]
    return math.fsum(system.gamma * (system.r - b2) ** 2)


def central_moment(system):
    b1, b2 = center_of_vorticity(system)
    return math.fsum(system.gamma * ((system.z - b1) ** 2 + (system.r - b2) ** 2))


def support_radius(system):
    if system.size == 0:
        raise DomainError("empty system")
    b2 = center_of_vorticity(system)[1]
    return float(np.max(np.abs(system.r - b2)))


def conserved_quantities(system):
    return math.fsum(system.gamma), math.fsum(system.gamma * system.r ** 2)


def energy(system, reg, q=DEFAULT_SPEC, method="elliptic"):
    """``pi sum_{j,k} gamma_j gamma_k S_delta(x_j, x_k)``, diagonal included.

    ``method="quadrature"`` evaluates each pair by adaptive quadrature
    (O(N^2) Python calls; meant for small oracle checks).
    """
    if system.size == 0:
        raise DomainError("empty system")
    if method == "elliptic":
        return math.pi * pairsum.green_double_sum(system.z, system.r, system.gamma, reg.delta)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    total = []
    n = system.size
    for j in range(n):
        xj = (system.z[j], system.r[j])
        for k in range(n):
            s = green_function(xj, (system.z[k], system.r[k]), q, delta=reg.delta)
            total.append(system.gamma[j] * system.gamma[k] * s)
    return math.pi * math.fsum(total)


def _field_sums(system, field_, t):
    if field_ is None or field_.is_zero:
        return 0.0, 0.0
    f1, f2 = field_(system.z, system.r, t)
    return math.fsum(system.gamma * f1), math.fsum(system.gamma * f2)


def velocity_parts(system, reg):
    """Weighted totals ``sum_j gamma_j (K1, K2, L1, R1, R2)(x_j)`` of the split velocity."""
    parts = pairsum.split_velocity(system.z, system.r, system.z, system.r, system.gamma, reg.delta)
    return [math.fsum(system.gamma * parts[:, c]) for c in range(5)]


def b_dot_prediction(system, field_, reg, t=None):
    """Velocity of the center of vorticity from the L and R double sums plus F.

    The K double sum vanishes by antisymmetry and is left out.
    """
    m = _mass(system)
    t = system.time if t is None else t
    _, _, l1, r1, r2 = velocity_parts(system, reg)
    f1, f2 = _field_sums(system, field_, t)
    return PlaneVector((f1 + l1 + r1) / m, (f2 + r2) / m)


def self_induction_Q(system, reg):
    """Lift double sum divided by the total weight (``|log eps|`` times it for a = 1)."""
    return pairsum.lift_double_sum(system.z, system.r, system.gamma, reg.delta) / _mass(system)


def concentration_disk(system, radius):
    """Best disk of given radius among particle-centred and B-centred candidates.

    Returns ``(q, fraction)``; ties go to the lowest particle index, and B
    wins only when strictly better than every particle.
    """
    if system.size == 0:
        raise DomainError("empty system")
    if not radius > 0:
        raise DomainError("radius must be positive")
    b = center_of_vorticity(system)
    cz = np.append(system.z, b[0])
    cr = np.append(system.r, b[1])
    w = pairsum.disk_weights(cz, cr, system.z, system.r, system.gamma, radius)
    best = int(np.argmax(w))
    inside = (system.z - cz[best]) ** 2 + (system.r - cr[best]) ** 2 <= radius * radius
    frac = math.fsum(system.gamma[inside]) / _mass(system)
    return HalfPlanePoint(float(cz[best]), float(cr[best])), min(1.0, max(0.0, frac))


def extents(system):
    return (float(system.z.min()), float(system.z.max()), float(system.r.min()), float(system.r.max()))


@dataclass
class DiagnosticsRecord:
    t: float
    B: PlaneVector
    I_axial: float
    J_central: float
    M0: float
    M2: float
    energy: float
    R_t: float
    tail_masses: tuple
    q: HalfPlanePoint
    fraction: float
    extents: tuple

    def row(self):
        return ((self.t, self.B[0], self.B[1], self.I_axial, self.J_central, self.M0, self.M2,
                 self.energy, self.R_t, self.q[0], self.q[1], self.fraction)
                + tuple(self.tail_masses) + tuple(self.extents))


class Recorder:
    """Builds DiagnosticsRecords with fixed settings.

    ``tail_levels`` are the h-values of the tail masses, in units of epsilon.
    ``concentration_radius`` defaults to ``eps |log eps|``.
    """

    def __init__(self, reg, tail_levels=(0.5, 1.0, 2.0), concentration_radius=None,
                 with_energy=True, per_ring=True):
        self.reg = reg
        self.tail_levels = tuple(float(h) for h in tail_levels)
        self.concentration_radius = concentration_radius
        self.with_energy = with_energy
        self.per_ring = per_ring

    def record(self, system):
        from .vorticity_field import tail_mass

        eps = system.epsilon
        m0, m2 = conserved_quantities(system)
        e = energy(system, self.reg) if self.with_energy else math.nan
        if m0 == 0.0:
            # opposite rings cancelling: mass-normalised quantities are undefined
            nan = math.nan
            return DiagnosticsRecord(system.time, PlaneVector(nan, nan), nan, nan, m0, m2, e, nan,
                                     tuple(nan for _ in self.tail_levels), HalfPlanePoint(nan, nan), nan,
                                     extents(system))
        b = center_of_vorticity(system)
        rad = self.concentration_radius or eps * abs(math.log(eps))
        q, frac = concentration_disk(system, rad)
        tails = tuple(tail_mass(system, b[1], h * eps) for h in self.tail_levels)
        return DiagnosticsRecord(system.time, b, axial_moment(system), central_moment(system), m0, m2,
                                 e, support_radius(system), tails, q, frac, extents(system))

    def __call__(self, system):
        rec = self.record(system)
        if self.per_ring and system.ring_count > 1:
            rec.rings = [self.record(system.subsystem(i)) for i in range(system.ring_count)]
        return rec


@dataclass
class TimeSeries:
    cadence: int = 1
    records: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    tail_levels: tuple = ()
    final_state: object = None

    def append(self, record, system=None):
        if self.records and not record.t > self.records[-1].t:
            raise ValueError("record times must be strictly increasing")
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def times(self):
        return np.array([r.t for r in self.records])

    def column(self, name):
        if name in ("B1", "B2"):
            k = int(name[1]) - 1
            return np.array([r.B[k] for r in self.records])
        if name == "E":
            return np.array([r.energy for r in self.records])
        return np.array([getattr(r, name) for r in self.records])

    def ring_series(self, i):
        """TimeSeries of ring ``i``'s own records (multi-ring runs only)."""
        out = TimeSeries(cadence=self.cadence, tail_levels=self.tail_levels)
        out.records = [r.rings[i] for r in self.records]
        return out

    @property
    def ring_count(self):
        if self.records and hasattr(self.records[0], "rings"):
            return len(self.records[0].rings)
        return 1

    def header(self):
        n = len(self.records[0].tail_masses) if self.records else len(self.tail_levels)
        levels = self.tail_levels or tuple(range(n))
        tails = tuple(f"tail_{_io.fmt(h)}" for h in levels)
        return BASE_COLUMNS + tails + EXTENT_COLUMNS

    def to_csv(self, path):
        _io.write_csv(path, self.header(), [r.row() for r in self.records])

    def csv_text(self):
        return _io.csv_text(self.header(), [r.row() for r in self.records])


def finite_difference_bdot(series):
    """Central differences of B at interior records, one-sided at the ends."""
    t = series.times
    b = np.stack([series.column("B1"), series.column("B2")], axis=1)
    return t, np.gradient(b, t, axis=0, edge_order=2)
