import json
import math

import numpy as np
import pytest

from vortexrings import asymptotics as asy
from vortexrings import config
from vortexrings.diagnostics import DiagnosticsRecord, TimeSeries


def series_from(points, extents=None, fractions=None, ij=None):
    s = TimeSeries()
    for k, (t, b) in enumerate(points):
        ext = extents[k] if extents else (0, 0, 1, 1)
        frac = fractions[k] if fractions else 1.0
        i, j = ij[k] if ij else (0.0, 0.0)
        s.append(DiagnosticsRecord(t, b, i, j, 1.0, 1.0, 0.0, 0.0, (), (0, 0), frac, ext))
    return s


TRAJ = asy.PredictedTrajectory((0.0, 1.0), 1.0)


# ------------------------------------------------------------ predictions

def test_predicted_center():
    assert asy.predicted_center(TRAJ, 0.0) == (0.0, 1.0)
    z, r = asy.predicted_center(TRAJ, 1.0)
    assert z == pytest.approx(1 / (4 * math.pi)) and z == pytest.approx(0.0795775, abs=1e-7)
    assert r == 1.0


def test_predicted_center_mirror():
    neg = asy.PredictedTrajectory((0.0, 1.0), -1.0)
    assert asy.predicted_center(neg, 2.0)[0] == -asy.predicted_center(TRAJ, 2.0)[0]
    assert TRAJ.speed > 0 > neg.speed


def test_trajectory_error():
    exact = series_from([(t, asy.predicted_center(TRAJ, t)) for t in (0, 0.5, 1)])
    assert asy.trajectory_error(exact, TRAJ) == 0.0
    shifted = series_from([(t, (asy.predicted_center(TRAJ, t)[0] + 0.3, 1.0)) for t in (0, 0.5, 1)])
    assert asy.trajectory_error(shifted, TRAJ) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        asy.trajectory_error(TimeSeries(), TRAJ)


def test_mean_axial_speed_and_radial_deviation():
    s = series_from([(0, (0, 1)), (2, (0.5, 1))], extents=[(0, 0, 0.95, 1.05), (0, 0, 0.9, 1.02)])
    assert asy.mean_axial_speed(s) == 0.25
    assert asy.radial_deviation(s, 1.0) == pytest.approx(0.1)


def test_anisotropy_widths():
    s = series_from([(0, (0, 1)), (1, (0, 1))], ij=[(0.01, 0.05), (0.04, 0.2)])
    sr, sz = asy.anisotropy(s)
    assert sr == pytest.approx(0.15) and sz == pytest.approx(0.3)


# ------------------------------------------------------------ bound checks

def test_trend_verdict():
    assert asy.trend_verdict([1.0]) == "inconclusive"
    assert asy.trend_verdict([1.0, 1.2, 1.4]) == "bounded"
    assert asy.trend_verdict([1.0, 1.3]) == "growing"
    assert asy.trend_verdict([0.0, 0.0]) == "bounded"


def test_radial_localization_initial_only():
    by = {e: series_from([(0, (0, 1))], extents=[(0, 0, 1 - e, 1 + e)]) for e in (0.05, 0.01)}
    chk = asy.check_radial_localization(by, 1.0, 0.2)
    assert chk.values == pytest.approx(chk.epsilons)
    assert chk.verdict == "bounded"
    with pytest.raises(ValueError):
        asy.check_radial_localization(by, 1.0, 0.3)


def test_moment_checks_at_initial_time():
    by = {e: series_from([(0, (0, 1))], ij=[(e * e, 2 * e * e)]) for e in (0.05, 0.01, 0.002)}
    ci, cj = asy.check_moment_bounds(by)
    assert ci.exponent == 2 and cj.exponent == 1
    assert ci.verdict == cj.verdict == "bounded"
    assert all(j >= i for i, j in zip(ci.values, cj.values))


def test_moment_check_detects_growth():
    by = {0.05: series_from([(0, (0, 1))], ij=[(1e-4, 1e-4)]),
          0.01: series_from([(0, (0, 1))], ij=[(1e-3, 1e-3)])}
    ci, cj = asy.check_moment_bounds(by)
    assert ci.verdict == cj.verdict == "growing" and not ci.ok


def test_concentration_check():
    ok = {e: series_from([(0, (0, 1))], fractions=[f]) for e, f in ((0.05, 0.9), (0.01, 0.95), (0.002, 0.97))}
    assert asy.check_concentration(ok).verdict == "bounded"
    bad = {e: series_from([(0, (0, 1))], fractions=[f]) for e, f in ((0.05, 0.99), (0.01, 0.5))}
    assert asy.check_concentration(bad).verdict == "growing"
    one = {0.05: series_from([(0, (0, 1))])}
    assert asy.check_concentration(one).verdict == "inconclusive"


def test_ladder_validation():
    with pytest.raises(ValueError):
        asy.EpsilonLadder([0.01, 0.05], {})
    with pytest.raises(ValueError):
        asy.EpsilonLadder([], {})


# ------------------------------------------------------------ runs and ladders

def _ladder_doc(epsilons, negative=False, horizon=0.1, res=6):
    return config.normalize_ladder({
        "schema_version": 1, "rings": [{"center": [0.0, 1.0], "resolution": res}],
        "numerics": {"horizon": horizon, "deterministic": True}, "diagnostics": {"cadence": 5},
        "ladder": {"epsilons": epsilons, "negative_control": negative}})


def test_one_epsilon_ladder(tmp_path):
    doc = _ladder_doc([0.05])
    rep = asy.run_epsilon_study(asy.EpsilonLadder.from_config(doc), tmp_path)
    assert len(rep.rows) == 1 and rep.complete and rep.passed
    assert all(c.verdict == "inconclusive" for c in rep.checks)
    rep.write(tmp_path)
    data = json.loads((tmp_path / "convergence.json").read_text())
    assert data["columns"] == list(asy.ROW_COLUMNS)
    assert (tmp_path / "convergence.csv").read_text().splitlines()[0] == ",".join(asy.ROW_COLUMNS)
    assert (tmp_path / "eps_0" / "timeseries.csv").exists()


def test_negative_control_fails_concentration(tmp_path):
    doc = _ladder_doc([0.05, 0.02], negative=True)
    rep = asy.run_epsilon_study(asy.EpsilonLadder.from_config(doc))
    conc = [c for c in rep.checks if c.name == "concentration"][0]
    assert conc.verdict == "growing" and not rep.passed


def test_simulate_constant_field_shift():
    base = config.normalize_run({"schema_version": 1, "epsilon": 0.05,
                                 "rings": [{"center": [0.0, 1.0], "resolution": 6}],
                                 "numerics": {"horizon": 0.1, "dt": 0.005, "deterministic": True},
                                 "diagnostics": {"cadence": 4}})
    pushed = json.loads(json.dumps(base))
    pushed["field"] = {"type": "constant-axial", "c": 0.5}
    a = asy.simulate(base, 0.05)
    b = asy.simulate(pushed, 0.05)
    shift = asy.mean_axial_speed(b.series) - asy.mean_axial_speed(a.series)
    assert shift == pytest.approx(0.5 / abs(math.log(0.05)), rel=1e-9)
    for col in ("I_axial", "J_central", "R_t"):
        assert np.allclose(a.series.column(col), b.series.column(col), rtol=1e-9, atol=1e-15)


def test_simulate_mirror_symmetry():
    doc = config.normalize_run({"schema_version": 1, "epsilon": 0.05,
                                "rings": [{"center": [0.0, 1.0], "resolution": 6}],
                                "numerics": {"horizon": 0.1, "dt": 0.005, "deterministic": True},
                                "diagnostics": {"cadence": 20}})
    mirror = json.loads(json.dumps(doc))
    mirror["rings"][0]["intensity"] = -1.0
    a = asy.simulate(doc, 0.05).series.final_state
    b = asy.simulate(mirror, 0.05).series.final_state
    assert np.allclose(np.sort(a.z), np.sort(-b.z), atol=1e-13)
    assert np.allclose(np.sort(a.r), np.sort(b.r), atol=1e-13)


def test_simulate_intensity_scaling():
    def speed(a):
        doc = config.normalize_run({"schema_version": 1, "epsilon": 0.05,
                                    "rings": [{"center": [0.0, 1.0], "resolution": 8, "intensity": a,
                                               "density_bound": 3.0}],
                                    "numerics": {"horizon": 0.05, "dt": 0.0025}, "diagnostics": {"cadence": 20}})
        return asy.mean_axial_speed(asy.simulate(doc, 0.05).series)

    assert speed(2.0) / speed(1.0) == pytest.approx(2.0, rel=1e-3)
