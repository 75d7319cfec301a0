"""Predicted ring motion, epsilon-ladder studies and |log eps|-scaled bound checks."""

import math
import os
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _backend
from . import io as _io
from .config import Scenario
from .diagnostics import Recorder, TimeSeries
from .dynamics import (ExternalField, GuardPolicy, IntegratorSpec, RegularizationSpec, default_dt, run)
from .errors import NumericalAbort
from .halfplane_kernel import HalfPlanePoint
from .vorticity_field import build_initial_data, write_snapshot

SLACK = 0.25


@dataclass(frozen=True)
class PredictedTrajectory:
    zeta0: HalfPlanePoint
    a: float

    @property
    def speed(self):
        return self.a / (4.0 * math.pi * self.zeta0[1])


def predicted_center(traj, t):
    if t < 0:
        raise ValueError("t must be non-negative")
    return HalfPlanePoint(traj.zeta0[0] + traj.speed * t, traj.zeta0[1])


def trajectory_error(series, traj):
    """``max_t |B(t) - zeta(t)|`` over the recorded snapshots."""
    if len(series) == 0:
        raise ValueError("empty series")
    return max(math.dist(rec.B, predicted_center(traj, rec.t)) for rec in series.records)


def mean_axial_speed(series):
    rec0, rec1 = series[0], series[-1]
    if rec1.t == rec0.t:
        return math.nan
    return (rec1.B[0] - rec0.B[0]) / (rec1.t - rec0.t)


def radial_deviation(series, r0):
    """``max_t max_j |x_j2 - r0|`` from the recorded radial extents."""
    return max(max(abs(rec.extents[2] - r0), abs(rec.extents[3] - r0)) for rec in series.records)


def anisotropy(series):
    """Time-averaged radial and axial core widths, ``(sigma_r, sigma_z)``.

    Widths are the square roots of the weighted radial and axial second
    moments about B, divided by the mass.
    """
    i = series.column("I_axial")
    j = series.column("J_central")
    m = series.column("M0")
    return float(np.mean(np.sqrt(i / m))), float(np.mean(np.sqrt((j - i) / m)))


# ---------------------------------------------------------------- single runs

@dataclass
class SimulationResult:
    epsilon: float
    series: TimeSeries
    initial: object
    dt: float
    steps: int
    runtime: float
    rings: tuple

    def predictions(self):
        return [PredictedTrajectory(r.center, r.intensity) for r in self.rings]

    def ring_series(self, i):
        return self.series.ring_series(i) if len(self.rings) > 1 else self.series


def make_field(doc, epsilon):
    f = doc["field"]
    if f["type"] == "constant-axial":
        return ExternalField.constant_axial(f["c"], epsilon)
    return ExternalField.zero(epsilon)


def simulate(doc, epsilon, deterministic=None, progress=None):
    """Build, integrate and record one scenario at the given epsilon."""
    scen = Scenario(doc)
    num = scen.numerics
    diag = scen.diagnostics
    if num["threads"]:
        _backend.set_threads(num["threads"])
    det = num["deterministic"] if deterministic is None else deterministic
    rings = scen.rings(epsilon)
    system = build_initial_data(rings, epsilon, num["separation_D"], num["separation_policy"])
    reg = RegularizationSpec.for_epsilon(epsilon, num["delta_ratio"])
    field_ = make_field(doc, epsilon)
    horizon = num["horizon"]
    if num["dt"] is None:
        dt = default_dt(system, field_, reg, horizon, num["dt_factor"], det)
    else:
        dt = num["dt"]
        if horizon > 0:
            dt = horizon / math.ceil(horizon / dt - 1e-9)
    recorder = Recorder(reg, diag["tail_levels"], diag["concentration_radius"], diag["energy"])
    t0 = _time.perf_counter()
    series = run(system, field_, horizon, IntegratorSpec(dt), reg, recorder, diag["cadence"],
                 GuardPolicy(num["guard"]), det, progress)
    return SimulationResult(epsilon, series, system, dt, int(round(horizon / dt)),
                            _time.perf_counter() - t0, tuple(rings))


def write_result(result, out_dir, snapshot=True):
    os.makedirs(out_dir, exist_ok=True)
    result.series.to_csv(os.path.join(out_dir, "timeseries.csv"))
    if len(result.rings) > 1:
        for i in range(len(result.rings)):
            result.series.ring_series(i).to_csv(os.path.join(out_dir, f"timeseries_ring{i}.csv"))
    if snapshot and result.series.final_state is not None:
        write_snapshot(result.series.final_state, os.path.join(out_dir, "snapshot_final.csv"))


# ---------------------------------------------------------------- bound checks

@dataclass
class BoundCheck:
    name: str
    exponent: float
    epsilons: list
    values: list
    scaled: list = field(default_factory=list)
    fitted_constant: float = math.nan
    verdict: str = "inconclusive"

    @property
    def ok(self):
        return self.verdict in ("bounded", "inconclusive")


def trend_verdict(scaled, slack=SLACK):
    """bounded iff each next value (smaller eps) is at most (1 + slack) times the previous."""
    if len(scaled) < 2:
        return "inconclusive"
    for a, b in zip(scaled, scaled[1:]):
        if not b <= (1.0 + slack) * a + 1e-12:
            return "growing"
    return "bounded"


def _bound_check(name, exponent, epsilons, values, scale, slack):
    scaled = [v * scale(e) for e, v in zip(epsilons, values)]
    finite = [s for s in scaled if math.isfinite(s)]
    return BoundCheck(name, exponent, list(epsilons), list(values), scaled,
                      max(finite) if finite else math.nan, trend_verdict(scaled, slack))


def _ordered(series_by_eps):
    items = sorted(dict(series_by_eps).items(), key=lambda kv: -kv[0])
    return [e for e, _ in items], [s for _, s in items]


def check_radial_localization(series_by_eps, r0, k, slack=SLACK):
    """``max_t max_j |x_j2 - r0|`` times ``|log eps|^k`` must not grow along the ladder."""
    if not 0.0 < k < 0.25:
        raise ValueError("k must lie in (0, 1/4)")
    eps, series = _ordered(series_by_eps)
    vals = [radial_deviation(s, r0) for s in series]
    return _bound_check("radial_localization", k, eps, vals, lambda e: abs(math.log(e)) ** k, slack)


def check_moment_bounds(series_by_eps, slack=SLACK, reduce="terminal"):
    """``I |log eps|^2`` and ``J |log eps|`` checks on terminal (or maximal) moments."""
    eps, series = _ordered(series_by_eps)
    pick = (lambda s, c: float(s.column(c)[-1])) if reduce == "terminal" else (
        lambda s, c: float(np.max(s.column(c))))
    ivals = [pick(s, "I_axial") for s in series]
    jvals = [pick(s, "J_central") for s in series]
    return (_bound_check("I_axial", 2.0, eps, ivals, lambda e: math.log(e) ** 2, slack),
            _bound_check("J_central", 1.0, eps, jvals, lambda e: abs(math.log(e)), slack))


def check_concentration(series_by_eps, slack=SLACK):
    """Terminal best-disk fraction must not drop as eps decreases, and
    ``(1 - fraction) log|log eps|`` must not grow."""
    eps, series = _ordered(series_by_eps)
    fr = [float(s[-1].fraction) for s in series]
    chk = _bound_check("concentration", 1.0, eps, fr,
                       lambda e: 1.0, slack)
    chk.scaled = [(1.0 - f) * math.log(abs(math.log(e))) for e, f in zip(eps, fr)]
    chk.fitted_constant = max(chk.scaled)
    if len(fr) < 2:
        chk.verdict = "inconclusive"
    elif any(b < a - 1e-12 for a, b in zip(fr, fr[1:])):
        chk.verdict = "growing"
    else:
        chk.verdict = trend_verdict(chk.scaled, slack)
    return chk


def two_cluster(system, separation):
    """Negative control: shift every second particle of each ring by ``separation`` in z."""
    z = system.z.copy()
    z[1::2] += separation
    return system.with_positions(z, system.r, system.time)


# ---------------------------------------------------------------- the ladder

@dataclass
class EpsilonLadder:
    epsilons: list
    doc: dict
    slack: float = SLACK
    k: float = 0.2
    workers: int = 1
    negative_control: bool = False

    def __post_init__(self):
        if not self.epsilons:
            raise ValueError("ladder needs at least one epsilon")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ValueError("ladder epsilons must be strictly decreasing")
        if any(not 0.0 < e < 1.0 for e in self.epsilons):
            raise ValueError("ladder epsilons must lie in (0, 1)")

    @classmethod
    def from_config(cls, doc):
        lad = doc["ladder"]
        return cls(list(lad["epsilons"]), doc, lad["slack"], lad["k"], lad["workers"], lad["negative_control"])


ROW_COLUMNS = ("epsilon", "ring", "particles", "dt", "steps", "runtime_s", "mean_speed", "predicted_speed",
               "speed_ratio", "ratio_fit", "trajectory_error", "B2_drift", "I_terminal", "J_terminal",
               "I_scaled", "J_scaled", "radial_deviation", "sigma_r", "sigma_z", "fraction_terminal",
               "fraction_min")


@dataclass
class ConvergenceReport:
    rows: list
    checks: list
    speed: dict
    complete: bool
    errors: list
    passed: bool

    def to_json(self):
        return {"rows": self.rows, "checks": [asdict(c) for c in self.checks], "speed": self.speed,
                "complete": self.complete, "errors": self.errors, "passed": self.passed,
                "columns": list(ROW_COLUMNS)}

    def write(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        _io.write_json(os.path.join(out_dir, "convergence.json"), self.to_json())
        _io.write_csv(os.path.join(out_dir, "convergence.csv"), ROW_COLUMNS,
                      [[row[c] for c in ROW_COLUMNS] for row in self.rows])


def _ladder_job(args):
    doc, eps, out_dir = args
    res = simulate(doc, eps)
    if out_dir is not None:
        write_result(res, out_dir, doc["output"]["snapshot"])
    return res


def _rows_for(res, ring):
    series = res.ring_series(ring)
    spec = res.rings[ring]
    traj = PredictedTrajectory(spec.center, spec.intensity)
    eps = res.epsilon
    le = abs(math.log(eps))
    speed = mean_axial_speed(series)
    ratio = speed / traj.speed
    sig_r, sig_z = anisotropy(series)
    n = int(np.sum(res.initial.ring_id == ring))
    i_t = float(series.column("I_axial")[-1])
    j_t = float(series.column("J_central")[-1])
    return {"epsilon": eps, "ring": ring, "particles": n, "dt": res.dt, "steps": res.steps,
            "runtime_s": res.runtime, "mean_speed": speed, "predicted_speed": traj.speed,
            "speed_ratio": ratio, "ratio_fit": (ratio - 1.0) * le,
            "trajectory_error": trajectory_error(series, traj),
            "B2_drift": series[-1].B[1] - spec.center.r, "I_terminal": i_t, "J_terminal": j_t,
            "I_scaled": i_t * le * le, "J_scaled": j_t * le,
            "radial_deviation": radial_deviation(series, spec.center.r), "sigma_r": sig_r, "sigma_z": sig_z,
            "fraction_terminal": float(series[-1].fraction),
            "fraction_min": float(np.min(series.column("fraction")))}


def speed_summary(rows, slack=SLACK):
    """Speed-ratio trend for one ring's rows ordered by decreasing epsilon."""
    ratios = [r["speed_ratio"] for r in rows]
    fits = [r["ratio_fit"] for r in rows]
    variation = float((max(fits) - min(fits)) / abs(np.mean(fits))) if len(fits) > 1 else 0.0
    above_one = all(x > 1.0 for x in ratios)
    decreasing = all(b < a for a, b in zip(ratios, ratios[1:]))
    return {"ratios": ratios, "fits": fits, "fit_variation": variation, "above_one": above_one,
            "decreasing": decreasing, "passed": bool(above_one and decreasing and variation <= slack)}


def run_epsilon_study(ladder, out_dir=None):
    """Run every epsilon (optionally in worker processes) and assemble the report."""
    jobs = [(ladder.doc, e, None if out_dir is None else os.path.join(out_dir, f"eps_{i}"))
            for i, e in enumerate(ladder.epsilons)]
    results, errors = {}, []
    if ladder.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=ladder.workers) as pool:
            futures = {e: pool.submit(_ladder_job, job) for job, e in zip(jobs, ladder.epsilons)}
            for e, fut in futures.items():
                try:
                    results[e] = fut.result()
                except NumericalAbort as exc:
                    errors.append(f"eps = {e}: {exc}")
    else:
        for job in jobs:
            try:
                results[job[1]] = _ladder_job(job)
            except NumericalAbort as exc:
                errors.append(f"eps = {job[1]}: {exc}")
    return assemble_report(ladder, results, errors)


def assemble_report(ladder, results, errors=()):
    errors = list(errors)
    complete = not errors and len(results) == len(ladder.epsilons)
    eps_done = [e for e in ladder.epsilons if e in results]
    nrings = len(ladder.doc["rings"])
    if ladder.negative_control and eps_done:
        e = eps_done[-1]
        res = results[e]
        rec = Recorder(RegularizationSpec.for_epsilon(e, ladder.doc["numerics"]["delta_ratio"]),
                       ladder.doc["diagnostics"]["tail_levels"], with_energy=False)
        fake = two_cluster(res.series.final_state, 10.0 * e * abs(math.log(e)))
        res.series.records[-1] = rec(fake)
    rows, checks, speed = [], [], {}
    for ring in range(nrings):
        ring_rows = [_rows_for(results[e], ring) for e in eps_done]
        rows.extend(ring_rows)
        by_eps = {e: results[e].ring_series(ring) for e in eps_done}
        r0 = results[eps_done[0]].rings[ring].center.r if eps_done else 1.0
        tag = f"ring{ring}:" if nrings > 1 else ""
        group = [check_radial_localization(by_eps, r0, ladder.k, ladder.slack),
                 *check_moment_bounds(by_eps, ladder.slack), check_concentration(by_eps, ladder.slack)]
        for c in group:
            c.name = tag + c.name
        checks.extend(group)
        speed[f"ring{ring}"] = speed_summary(ring_rows, ladder.slack)
        speed[f"ring{ring}"]["anisotropy"] = all(r["sigma_r"] < r["sigma_z"] for r in ring_rows)
    if len(eps_done) < 2:
        speed_ok = True
    else:
        speed_ok = all(s["passed"] for s in speed.values())
    passed = complete and speed_ok and all(c.ok for c in checks)
    return ConvergenceReport(rows, checks, speed, complete, errors, passed)
