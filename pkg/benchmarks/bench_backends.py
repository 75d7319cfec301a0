"""Time the pair-sum velocity and one RK4 step under the numba and numpy backends.

Each backend runs in its own interpreter because the choice is fixed at import
time by VORTEXRINGS_DISABLE_NUMBA.

    python3 benchmarks/bench_backends.py --sizes 200 800 2000
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from vortexrings import _backend, pairsum
from vortexrings.dynamics import ExternalField, IntegratorSpec, RegularizationSpec, step
from vortexrings.vorticity_field import VortexSystem

sizes, repeats = json.loads(sys.argv[1]), int(sys.argv[2])
out = {"backend": _backend.backend_name(), "results": []}
rng = np.random.default_rng(0)
for n in sizes:
    z = rng.normal(0.0, 0.05, n)
    r = 1.0 + rng.normal(0.0, 0.05, n)
    g = np.full(n, 1.0 / n)
    reg = RegularizationSpec.for_epsilon(0.05)
    sys_ = VortexSystem(z, r, g, np.zeros(n, dtype=np.int64), 0.05)
    field_ = ExternalField.zero(0.05)
    pairsum.self_velocity(z, r, g, reg.delta)  # warm-up / compile
    step(sys_, field_, IntegratorSpec(1e-3), reg)
    best_v = best_s = float("inf")
    for _ in range(repeats):
        t = time.perf_counter(); pairsum.self_velocity(z, r, g, reg.delta); best_v = min(best_v, time.perf_counter() - t)
        t = time.perf_counter(); step(sys_, field_, IntegratorSpec(1e-3), reg); best_s = min(best_s, time.perf_counter() - t)
    out["results"].append({"n": n, "velocity_s": best_v, "rk4_step_s": best_s})
print(json.dumps(out))
"""


def run_backend(disable, sizes, repeats):
    env = dict(os.environ, VORTEXRINGS_DISABLE_NUMBA="1" if disable else "0")
    proc = subprocess.run([sys.executable, "-c", WORKER, json.dumps(sizes), str(repeats)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[200, 800, 2000])
    p.add_argument("--repeats", type=int, default=3)
    args = p.parse_args(argv)
    fast = run_backend(False, args.sizes, args.repeats)
    slow = run_backend(True, args.sizes, args.repeats)
    print(f"{'N':>6} {fast['backend'] + ' vel':>12} {'numpy vel':>12} {'speedup':>8} "
          f"{fast['backend'] + ' step':>12} {'numpy step':>12} {'speedup':>8}")
    for a, b in zip(fast["results"], slow["results"]):
        print(f"{a['n']:>6} {a['velocity_s']:>12.4g} {b['velocity_s']:>12.4g} "
              f"{b['velocity_s'] / a['velocity_s']:>8.1f} {a['rk4_step_s']:>12.4g} "
              f"{b['rk4_step_s']:>12.4g} {b['rk4_step_s'] / a['rk4_step_s']:>8.1f}")


if __name__ == "__main__":
    main()
