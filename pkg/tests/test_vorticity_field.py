import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vortexrings.errors import ConfigurationError, DomainError
from vortexrings.vorticity_field import (BUMP_NORMALIZATION, MollifierSpec, RingSpec, VortexSystem,
                                         build_initial_data, integrate_observable, max_density,
                                         mollified_tail, mollifier_W, mollifier_W_prime, read_snapshot,
                                         reconstruct_density, tail_mass, write_snapshot)

EPS = 0.05


def ring(center=(0.0, 1.0), eps=EPS, **kw):
    return RingSpec(center, eps, **kw)


@pytest.fixture(scope="module")
def disk():
    return build_initial_data([ring()], EPS)


def cloud(n, seed):
    rng = np.random.default_rng(seed)
    return VortexSystem(rng.uniform(-1, 1, n), rng.uniform(0.5, 1.5, n), rng.uniform(0.01, 1, n),
                        np.zeros(n, dtype=int), 0.1)


# ------------------------------------------------------------ construction

def test_weight_sum_is_exact(disk):
    assert math.fsum(disk.gamma) == 1.0 / abs(math.log(EPS))


@pytest.mark.parametrize("profile", ["uniform-disk", "truncated-gaussian"])
@pytest.mark.parametrize("eps,a", [(0.05, 1.0), (0.01, 2.5), (0.002, -0.7)])
def test_weight_sum_exact_for_each_profile(profile, eps, a):
    s = build_initial_data([RingSpec((0.0, 1.0), eps, a, profile, density_bound=10.0)], eps)
    assert math.fsum(s.gamma) == a / abs(math.log(eps))
    assert np.all(np.sign(s.gamma) == np.sign(a))


def test_particles_inside_core(disk):
    assert np.all(np.hypot(disk.z, disk.r - 1.0) <= EPS)


def test_uniform_peak_density_within_bound(disk):
    cell = ring().cell
    peak = float(np.max(disk.gamma)) / cell ** 2
    le = abs(math.log(EPS))
    assert peak == pytest.approx(1.0 / (math.pi * EPS ** 2 * le), rel=0.1)
    assert peak <= 1.0 / (EPS ** 2 * le)


def test_weights_are_immutable(disk):
    with pytest.raises(ValueError):
        disk.gamma[0] = 1.0
    moved = disk.with_positions(disk.z + 1, disk.r, 0.5)
    assert moved.gamma is disk.gamma and moved.time == 0.5


def test_two_rings_ids_and_masses():
    s = build_initial_data([ring((0, 1)), RingSpec((0, 2), EPS, 2.0, density_bound=2.0)], EPS)
    assert s.ring_count == 2
    assert s.ring_mass(0) == 1 / abs(math.log(EPS))
    assert s.ring_mass(1) == 2 / abs(math.log(EPS))
    sub = s.subsystem(1)
    assert sub.size == int(np.sum(s.ring_id == 1)) and sub.total_mass() == s.ring_mass(1)


def test_overlapping_rings_rejected():
    with pytest.raises(ConfigurationError, match="rings 0 and 1"):
        build_initial_data([ring((0, 1)), ring((0.05, 1.0))], EPS)


def test_ring_touching_axis_rejected():
    with pytest.raises(ConfigurationError):
        RingSpec((0.0, 0.04), EPS)


def test_density_bound_violation_rejected():
    with pytest.raises(ConfigurationError, match="peak density"):
        build_initial_data([RingSpec((0, 1), EPS, 1.0, density_bound=0.1)], EPS)


def test_separation_policy():
    rings = [ring((0, 1)), ring((0, 1.3))]
    with pytest.raises(ConfigurationError):
        build_initial_data(rings, EPS, separation_D=0.4)
    with pytest.warns(UserWarning):
        build_initial_data(rings, EPS, separation_D=0.4, separation_policy="warn")
    build_initial_data(rings, EPS, separation_D=0.4, separation_policy="off")
    build_initial_data([ring((0, 1)), ring((0, 2))], EPS, separation_D=0.4)


@pytest.mark.parametrize("kw", [dict(resolution=3), dict(profile="square"), dict(intensity=0.0)])
def test_ring_spec_validation(kw):
    with pytest.raises(ConfigurationError):
        ring(**kw)


# ------------------------------------------------------------ observables

def test_observable_constant(disk):
    assert integrate_observable(disk, lambda x: 1.0) == pytest.approx(1 / abs(math.log(EPS)), rel=1e-15)


def test_observable_r_squared(disk):
    v = integrate_observable(disk, lambda x: x.r ** 2)
    assert abs(v - 1 / abs(math.log(EPS))) <= 2 * EPS / abs(math.log(EPS))


def test_observable_symmetric_layout(disk):
    assert abs(integrate_observable(disk, lambda x: x.z)) <= 1e-12


def test_tail_mass_limits(disk):
    assert tail_mass(disk, 1.0, 2 * EPS) == 0.0
    assert tail_mass(disk, 1.0 + 1e-7, 0.0) == disk.total_mass()


def test_tail_mass_monotone(disk):
    vals = [tail_mass(disk, 1.0, h) for h in (0, EPS / 2, EPS, 2 * EPS)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_tail_mass_negative_h():
    with pytest.raises(DomainError):
        tail_mass(cloud(3, 0), 1.0, -1.0)


# ------------------------------------------------------------ mollifier

def test_mollifier_plateau_and_support():
    spec = MollifierSpec(0.3, 0.1)
    assert mollifier_W(spec, 0.0) == 1.0
    assert mollifier_W(spec, 0.4) == 0.0
    assert mollifier_W(spec, 0.7 * 0.4) == mollifier_W(spec, -0.7 * 0.4)


def test_mollifier_derivative_bound():
    spec = MollifierSpec(0.3, 0.1)
    s = np.linspace(-0.5, 0.5, 200001)
    assert np.max(np.abs(mollifier_W_prime(spec, s))) <= spec.C / spec.h * (1 + 1e-12)
    assert np.max(np.abs(mollifier_W_prime(spec, s))) == pytest.approx(30 / 16 / spec.h, rel=1e-6)


def test_mollifier_derivative_matches_finite_difference():
    spec = MollifierSpec(0.3, 0.1)
    s = np.linspace(-0.45, 0.45, 91)
    h = 1e-7
    fd = (mollifier_W(spec, s + h) - mollifier_W(spec, s - h)) / (2 * h)
    assert np.allclose(mollifier_W_prime(spec, s), fd, atol=1e-6)


def test_mollifier_second_derivative_bound():
    spec = MollifierSpec(0.3, 0.1)
    s = np.linspace(0.3, 0.4, 100001)
    d2 = np.gradient(mollifier_W_prime(spec, s), s)
    assert np.max(np.abs(d2)) <= spec.second_derivative_constant / spec.h ** 2 * 1.001


def test_mollified_tail_inside_plateau(disk):
    assert mollified_tail(disk, 1.0, MollifierSpec(2 * EPS, EPS)) == 0.0


@given(st.integers(0, 10 ** 6), st.floats(0.05, 0.5), st.floats(0.01, 0.2))
def test_sandwich(seed, R, h):
    if not R > h:
        return
    s = cloud(200, seed)
    c = 1.0
    lo = mollified_tail(s, c, MollifierSpec(R, h))
    mid = tail_mass(s, c, R)
    hi = mollified_tail(s, c, MollifierSpec(R - h, h))
    assert lo <= mid * (1 + 1e-14) + 1e-15
    assert mid <= hi * (1 + 1e-14) + 1e-15


@given(st.integers(0, 10 ** 6))
def test_mollified_tail_monotone_in_R(seed):
    s = cloud(100, seed)
    vals = [mollified_tail(s, 1.0, MollifierSpec(R, 0.05)) for R in (0.05, 0.1, 0.2, 0.4)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))


def test_mollified_tail_small_h_limit():
    s = cloud(300, 5)
    R = 0.2
    approx = mollified_tail(s, 1.0, MollifierSpec(R, 1e-6 * R))
    band = math.fsum(s.gamma[np.abs(np.abs(s.r - 1.0) - R) < 1e-6 * R + 1e-12])
    assert abs(approx - tail_mass(s, 1.0, R)) <= band + 1e-15


# ------------------------------------------------------------ density reconstruction

def test_density_of_empty_system():
    e = VortexSystem([], [], [], [], 0.1)
    assert reconstruct_density(e, (0, 1), 0.1) == 0.0


def test_density_single_particle():
    s = VortexSystem([0.0], [1.0], [0.3], [0], 0.1)
    assert reconstruct_density(s, (0.0, 1.0), 0.2) == pytest.approx(0.3 / (BUMP_NORMALIZATION * 0.04), rel=1e-15)


def test_bump_normalisation():
    from scipy.integrate import quad

    val, _ = quad(lambda rho: 2 * math.pi * rho * (1 - rho * rho) ** 2, 0, 1)
    assert val == pytest.approx(BUMP_NORMALIZATION, rel=1e-13)


def test_density_at_center_of_uniform_disk(disk):
    b = 2 * ring().cell
    le = abs(math.log(EPS))
    assert reconstruct_density(disk, (0.0, 1.0), b) == pytest.approx(1 / (math.pi * EPS ** 2 * le), rel=0.1)


def test_initial_density_bound(disk):
    le = abs(math.log(EPS))
    assert max_density(disk, 2 * ring().cell) <= 1.0 / (EPS ** 2 * le)


def test_density_bandwidth_validation(disk):
    with pytest.raises(DomainError):
        reconstruct_density(disk, (0, 1), 0.0)


# ------------------------------------------------------------ snapshots

def test_snapshot_round_trip(tmp_path, disk):
    moved = disk.with_positions(disk.z + 1 / 3, disk.r * math.pi / 3, 0.1)
    path = tmp_path / "snap.csv"
    write_snapshot(moved, path)
    back = read_snapshot(path, EPS)
    for name in ("z", "r", "gamma", "ring_id"):
        assert np.array_equal(getattr(back, name), getattr(moved, name))
    assert path.read_text().splitlines()[0] == "ring_id,z,r,gamma"
