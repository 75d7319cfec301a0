"""Velocity evaluation, external fields and RK4 integration of the particles."""

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import pairsum
from .errors import ConfigurationError, DomainError, NumericalAbort
from .halfplane_kernel import (PlaneVector, axisym_kernel_elliptic, green_function_elliptic)


# ---------------------------------------------------------------- external fields

@dataclass(frozen=True)
class ExternalField:
    """Prescribed field ``F(x, t)``.

    ``func(z, r, t)`` takes arrays and returns ``(F1, F2)`` arrays of the same
    shape. ``C_F`` and ``lipschitz`` are the declared constants in
    ``|F| <= C_F/|log eps|`` and ``Lip(F) <= lipschitz/|log eps|``.
    """

    func: Callable
    C_F: float
    lipschitz: float
    epsilon: float
    name: str = "custom"
    is_zero: bool = False

    def __call__(self, z, r, t):
        f1, f2 = self.func(np.asarray(z, dtype=float), np.asarray(r, dtype=float), t)
        shape = np.shape(z)
        return np.broadcast_to(f1, shape).astype(float), np.broadcast_to(f2, shape).astype(float)

    def evaluate(self, x, t=0.0):
        f1, f2 = self(np.array([x[0]]), np.array([x[1]]), t)
        return PlaneVector(float(f1[0]), float(f2[0]))

    @property
    def log_eps(self):
        return abs(math.log(self.epsilon))

    @classmethod
    def zero(cls, epsilon):
        return cls(lambda z, r, t: (0.0, 0.0), 0.0, 0.0, epsilon, "zero", True)

    @classmethod
    def constant_axial(cls, c, epsilon):
        """``F = (c/|log eps|, 0)``; divergence-free since ``x2 F1`` is independent of z."""
        v = c / abs(math.log(epsilon))
        return cls(lambda z, r, t: (v, 0.0), abs(c), 0.0, epsilon, "constant-axial", c == 0.0)

    @classmethod
    def constant(cls, c1, c2, epsilon, C_F=None):
        """Arbitrary constant field (not divergence-free unless ``c2 == 0``)."""
        le = abs(math.log(epsilon))
        v1, v2 = c1 / le, c2 / le
        cf = math.hypot(c1, c2) if C_F is None else C_F
        return cls(lambda z, r, t: (v1, v2), cf, 0.0, epsilon, "constant", c1 == 0.0 and c2 == 0.0)


@dataclass
class ValidationReport:
    passed: bool
    bound_ok: bool
    lipschitz_ok: bool
    divergence_ok: bool
    worst_bound_ratio: float
    worst_lipschitz_ratio: float
    worst_divergence: float
    divergence_tolerance: float
    messages: list = field(default_factory=list)


def validate_external_field(field_, probe_box, samples=16, times=(0.0,), h_fd=1e-5, seed=0):
    """Sample the bound, Lipschitz and axisymmetric-divergence conditions.

    ``probe_box = (z_min, z_max, r_min, r_max)`` with ``r_min > 0``. Bounds
    are checked on a ``samples x samples`` grid, Lipschitz ratios on random
    pairs of grid points, divergence by central differences of step ``h_fd``.
    Ratios are measured/declared, so a value above 1 is a violation.
    """
    z0, z1, r0, r1 = map(float, probe_box)
    if not r0 > 0.0:
        raise DomainError("probe box must lie inside r > 0")
    le = field_.log_eps
    zz, rr = np.meshgrid(np.linspace(z0, z1, samples), np.linspace(r0, r1, samples), indexing="ij")
    zz = zz.ravel()
    rr = rr.ravel()
    rng = np.random.default_rng(seed)
    bound_ratio = 0.0
    lip_ratio = 0.0
    worst_div = 0.0
    cf = field_.C_F / le
    lip = field_.lipschitz / le
    slack = 1e-12
    for t in times:
        f1, f2 = field_(zz, rr, t)
        mag = np.hypot(f1, f2)
        bound_ratio = max(bound_ratio, float(np.max(mag)) / cf if cf > 0 else (math.inf if np.any(mag > 0) else 0.0))
        i = rng.integers(0, zz.size, 4 * zz.size)
        j = rng.integers(0, zz.size, 4 * zz.size)
        sel = i != j
        i, j = i[sel], j[sel]
        dist = np.hypot(zz[i] - zz[j], rr[i] - rr[j])
        df = np.hypot(f1[i] - f1[j], f2[i] - f2[j])
        ok = dist > 0
        ratio = df[ok] / dist[ok]
        worst = float(np.max(ratio)) if ratio.size else 0.0
        lip_ratio = max(lip_ratio, worst / lip if lip > 0 else (math.inf if worst > slack * max(cf, 1e-300) else 0.0))
        a1, _ = field_(zz + h_fd, rr, t)
        b1, _ = field_(zz - h_fd, rr, t)
        _, a2 = field_(zz, rr + h_fd, t)
        _, b2 = field_(zz, rr - h_fd, t)
        div = (rr * (a1 - b1) + (rr + h_fd) * a2 - (rr - h_fd) * b2) / (2.0 * h_fd)
        worst_div = max(worst_div, float(np.max(np.abs(div))))
    div_tol = 1e-6 * (field_.C_F / le) / h_fd
    bound_ok = bound_ratio <= 1.0 + slack
    lip_ok = lip_ratio <= 1.0 + slack
    div_ok = worst_div <= div_tol
    msgs = []
    if not bound_ok:
        msgs.append(f"|F| exceeds C_F/|log eps| by factor {bound_ratio:.6g}")
    if not lip_ok:
        msgs.append(f"Lipschitz ratio {lip_ratio:.6g} exceeds the declared constant")
    if not div_ok:
        msgs.append(f"axisymmetric divergence {worst_div:.3g} above tolerance {div_tol:.3g}")
    return ValidationReport(bound_ok and lip_ok and div_ok, bound_ok, lip_ok, div_ok,
                            bound_ratio, lip_ratio, worst_div, div_tol, msgs)


# ---------------------------------------------------------------- velocities

@dataclass(frozen=True)
class RegularizationSpec:
    """Blob parameter: every separation ``|x-y|`` becomes ``sqrt(|x-y|^2 + delta^2)``."""

    delta: float
    scheme: str = "smoothed-separation"

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ConfigurationError("delta must be positive")
        if self.scheme != "smoothed-separation":
            raise ConfigurationError(f"unknown regularization scheme {self.scheme!r}")

    @classmethod
    def for_epsilon(cls, epsilon, ratio=0.5):
        reg = cls(ratio * epsilon)
        reg.check(epsilon)
        return reg

    def check(self, epsilon):
        if self.delta > epsilon:
            raise ConfigurationError(f"delta = {self.delta} exceeds the core radius {epsilon}")


@dataclass(frozen=True)
class IntegratorSpec:
    dt: float
    scheme: str = "rk4"

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ConfigurationError("dt must be positive")
        if self.scheme != "rk4":
            raise ConfigurationError(f"unknown integrator {self.scheme!r}")


def induced_velocity(system, x, reg):
    """``sum_j gamma_j H_delta(x, x_j)`` at a single point ``x``."""
    if not x[1] > 0.0:
        raise DomainError(f"target must lie in r > 0, got {x[1]}")
    u = pairsum.velocity(np.array([x[0]]), np.array([x[1]]), system.z, system.r, system.gamma, reg.delta)
    return PlaneVector(float(u[0, 0]), float(u[0, 1]))


def _check_radii(r, time):
    bad = np.flatnonzero(~(r > 0.0))
    if bad.size:
        i = int(bad[0])
        raise NumericalAbort(f"particle {i} left the half-plane (r = {float(r[i])!r}) at t = {float(time)!r}",
                             index=i, time=time)


def _rhs(z, r, gamma, field_, t, reg, deterministic):
    _check_radii(r, t)
    u = pairsum.self_velocity(z, r, gamma, reg.delta, deterministic=deterministic)
    if field_ is not None and not field_.is_zero:
        f1, f2 = field_(z, r, t)
        u[:, 0] += f1
        u[:, 1] += f2
    return u


def system_rhs(system, field_, t, reg, deterministic=False):
    """Per-particle ``u + F``, shape (N, 2)."""
    return _rhs(system.z, system.r, system.gamma, field_, t, reg, deterministic)


def _rk4(z, r, gamma, field_, t, dt, reg, deterministic):
    k1 = _rhs(z, r, gamma, field_, t, reg, deterministic)
    h = 0.5 * dt
    k2 = _rhs(z + h * k1[:, 0], r + h * k1[:, 1], gamma, field_, t + h, reg, deterministic)
    k3 = _rhs(z + h * k2[:, 0], r + h * k2[:, 1], gamma, field_, t + h, reg, deterministic)
    k4 = _rhs(z + dt * k3[:, 0], r + dt * k3[:, 1], gamma, field_, t + dt, reg, deterministic)
    w = dt / 6.0
    zn = z + w * (k1[:, 0] + 2.0 * k2[:, 0] + 2.0 * k3[:, 0] + k4[:, 0])
    rn = r + w * (k1[:, 1] + 2.0 * k2[:, 1] + 2.0 * k3[:, 1] + k4[:, 1])
    _check_radii(rn, t + dt)
    return zn, rn


def step(system, field_, spec, reg, deterministic=False):
    """One classical RK4 step; returns a new system (weights shared)."""
    zn, rn = _rk4(system.z, system.r, system.gamma, field_, system.time, spec.dt, reg, deterministic)
    return system.with_positions(zn, rn, system.time + spec.dt)


def integrate_ode(velocity, z, r, t0, dt, nsteps):
    """RK4 for a prescribed field ``velocity(z, r, t) -> (u1, u2)``; no kernel sums."""
    z = np.array(z, dtype=float)
    r = np.array(r, dtype=float)
    t = t0
    for _ in range(nsteps):
        a1, a2 = velocity(z, r, t)
        b1, b2 = velocity(z + 0.5 * dt * a1, r + 0.5 * dt * a2, t + 0.5 * dt)
        c1, c2 = velocity(z + 0.5 * dt * b1, r + 0.5 * dt * b2, t + 0.5 * dt)
        d1, d2 = velocity(z + dt * c1, r + dt * c2, t + dt)
        z = z + dt / 6.0 * (a1 + 2 * b1 + 2 * c1 + d1)
        r = r + dt / 6.0 * (a2 + 2 * b2 + 2 * c2 + d2)
        t += dt
    return z, r


def default_dt(system, field_, reg, horizon=None, factor=0.2, deterministic=False):
    """``factor * delta / max|u + F|`` at the initial state.

    With a positive ``horizon`` the step is shortened so that it divides the
    horizon exactly.
    """
    u = system_rhs(system, field_, system.time, reg, deterministic)
    vmax = float(np.max(np.hypot(u[:, 0], u[:, 1]))) if system.size else 0.0
    dt = factor * reg.delta / vmax if vmax > 0.0 else factor * reg.delta
    if horizon is not None and horizon > 0.0:
        dt = horizon / math.ceil(horizon / dt - 1e-9)
    return dt


# ---------------------------------------------------------------- run driver

@dataclass(frozen=True)
class GuardPolicy:
    """Corridor ``r0/2 <= r <= 3 r0/2`` per ring: mode is "warn", "abort" or "off"."""

    mode: str = "warn"
    lower: float = 0.5
    upper: float = 1.5

    def __post_init__(self):
        if self.mode not in ("warn", "abort", "off"):
            raise ConfigurationError(f"unknown guard mode {self.mode!r}")


def guard_violations(system, policy):
    out = []
    if policy.mode == "off" or not system.rings:
        return out
    for i, ring in enumerate(system.rings):
        r = system.r[system.ring_id == i]
        r0 = ring.center.r
        if r.size and (r.min() < policy.lower * r0 or r.max() > policy.upper * r0):
            out.append(f"ring {i} left the corridor [{policy.lower * r0}, {policy.upper * r0}]"
                       f" at t = {system.time!r}")
    return out


def run(system, field_, horizon, integrator, reg, recorder=None, cadence=1,
        guard=GuardPolicy(), deterministic=False, progress=None):
    """Integrate to ``horizon`` and return the TimeSeries of recorded states.

    ``recorder(system) -> DiagnosticsRecord`` defaults to the standard
    diagnostics. The step count is ``round(horizon / dt)``; a mismatch larger
    than 1e-9 relative is a configuration error. Records are taken every
    ``cadence`` steps and at the end.
    """
    from . import diagnostics

    if horizon < 0.0:
        raise ConfigurationError("horizon must be non-negative")
    if cadence < 1:
        raise ConfigurationError("cadence must be >= 1")
    reg.check(system.epsilon)
    if recorder is None:
        recorder = diagnostics.Recorder(reg)
    nsteps = int(round(horizon / integrator.dt))
    if horizon > 0.0 and abs(nsteps * integrator.dt - horizon) > 1e-9 * horizon:
        raise ConfigurationError(f"dt = {integrator.dt} does not divide the horizon {horizon}")
    t0 = system.time
    series = diagnostics.TimeSeries(cadence=cadence, tail_levels=getattr(recorder, "tail_levels", ()))
    series.append(recorder(system), system)
    z = system.z.copy()
    r = system.r.copy()
    for k in range(1, nsteps + 1):
        t = t0 + (k - 1) * integrator.dt
        z, r = _rk4(z, r, system.gamma, field_, t, integrator.dt, reg, deterministic)
        if k % cadence == 0 or k == nsteps:
            state = system.with_positions(z, r, t0 + k * integrator.dt)
            for msg in guard_violations(state, guard):
                if guard.mode == "abort":
                    raise NumericalAbort(msg, time=state.time)
                if msg not in series.warnings:
                    series.warnings.append(msg)
                    warnings.warn(msg, RuntimeWarning, stacklevel=2)
            series.append(recorder(state), state)
            if progress is not None:
                progress(k, nsteps)
    series.final_state = system.with_positions(z, r, t0 + nsteps * integrator.dt)
    return series


# ---------------------------------------------------------------- mollified interaction

@dataclass(frozen=True)
class MollifiedKernelSpec:
    """Stream-function blend ``S~ = beta(|x-y|) S`` with ``beta = 1`` beyond ``cutoff``."""

    cutoff: float
    blend: float

    def __post_init__(self):
        if not (0.0 < self.blend < self.cutoff):
            raise ConfigurationError("need 0 < blend < cutoff")


def _ramp(rho, spec):
    """``(beta, beta')`` for the quintic C^2 ramp on [cutoff - blend, cutoff]."""
    t = (rho - (spec.cutoff - spec.blend)) / spec.blend
    if t <= 0.0:
        return 0.0, 0.0
    if t >= 1.0:
        return 1.0, 0.0
    b = t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    db = 30.0 * t * t * (1.0 - t) ** 2 / spec.blend
    return b, db


def mollified_interaction(x, y, spec):
    """Velocity kernel of the blended stream function ``beta S``.

    ``H~ = beta H + (S beta' / (x2 rho)) (x2 - y2, y1 - x1)``; it is the
    ``x2^-1 grad-perp`` of ``beta S``, so ``x2 H~`` is divergence-free.
    """
    if not (x[1] > 0.0 and y[1] > 0.0):
        raise DomainError("mollified interaction needs both points in r > 0")
    rho = math.hypot(x[0] - y[0], x[1] - y[1])
    beta, dbeta = _ramp(rho, spec)
    if beta == 0.0:
        return PlaneVector(0.0, 0.0)
    h = axisym_kernel_elliptic(x, y)
    if dbeta == 0.0:
        return PlaneVector(beta * h[0], beta * h[1])
    c = green_function_elliptic(x, y) * dbeta / (x[1] * rho)
    return PlaneVector(beta * h[0] + c * (x[1] - y[1]), beta * h[1] + c * (y[0] - x[0]))


def mollified_stream(x, y, spec):
    rho = math.hypot(x[0] - y[0], x[1] - y[1])
    beta, _ = _ramp(rho, spec)
    return 0.0 if beta == 0.0 else beta * green_function_elliptic(x, y)
