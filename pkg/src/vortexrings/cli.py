"""Command-line entry point: ``vortexrings {simulate,kernel-selftest,convergence}``.

Exit codes: 0 success, 1 configuration error, 2 numerical abort or
incomplete ladder, 3 self-test or verdict failure.
"""

import argparse
import os
import sys

from . import _backend
from . import config as _config
from .errors import ConfigurationError, DomainError, NumericalAbort

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ABORT = 2
EXIT_FAILED = 3

OUT_ENV = "VORTEXRINGS_OUT"


def _out_dir(args, doc_dir):
    return args.out or os.environ.get(OUT_ENV) or doc_dir


def cmd_simulate(args):
    from .asymptotics import PredictedTrajectory, simulate, trajectory_error, write_result

    doc = _config.load(args.config, "run")
    if args.deterministic:
        doc["numerics"]["deterministic"] = True
    out = _out_dir(args, doc["output"]["dir"])
    res = simulate(doc, doc["epsilon"])
    write_result(res, out, doc["output"]["snapshot"])
    _config_copy(doc, out)
    last = res.series[-1]
    parts = [f"t={last.t:.6g}", f"B=({last.B[0]:.9g}, {last.B[1]:.9g})", f"particles={res.initial.size}",
             f"steps={res.steps}"]
    for i in range(len(res.rings)):
        traj = PredictedTrajectory(res.rings[i].center, res.rings[i].intensity)
        parts.append(f"traj_err[{i}]={trajectory_error(res.ring_series(i), traj):.6g}")
    print("simulate: " + " ".join(parts) + f" out={out}")
    return EXIT_OK


def _config_copy(doc, out):
    from .io import atomic_write_text

    atomic_write_text(os.path.join(out, "config.normalized.json"), _config.dumps(doc))


def cmd_kernel_selftest(args):
    from . import selftest

    if args.inject_fault:
        with selftest.injected_fault():
            results = selftest.run_all()
    else:
        results = selftest.run_all()
    out = _out_dir(args, ".")
    path = os.path.join(out, "kernel_selftest.csv")
    selftest.write_report(results, path)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: max_error={r.max_error:.3e} "
              f"tol={r.tolerance:.1e} n={r.samples} ({r.seconds:.2f}s)")
    print(f"report: {path}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def cmd_convergence(args):
    from .asymptotics import EpsilonLadder, run_epsilon_study

    doc = _config.load(args.config, "ladder")
    if args.deterministic:
        doc["numerics"]["deterministic"] = True
    out = _out_dir(args, doc["output"]["dir"])
    ladder = EpsilonLadder.from_config(doc)
    report = run_epsilon_study(ladder, out)
    report.write(out)
    _config_copy(doc, out)
    for row in report.rows:
        print(f"eps={row['epsilon']:.4g} ring={row['ring']} ratio={row['speed_ratio']:.6f} "
              f"fit={row['ratio_fit']:.6f} traj_err={row['trajectory_error']:.3e} "
              f"fraction={row['fraction_terminal']:.4f}")
    for c in report.checks:
        print(f"check {c.name}: {c.verdict}")
    for name, s in report.speed.items():
        print(f"speed {name}: fit variation {s['fit_variation']:.3%} "
              f"{'ok' if s['passed'] or len(ladder.epsilons) < 2 else 'FAILED'}")
    if not report.complete:
        for e in report.errors:
            print(f"incomplete: {e}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK if report.passed else EXIT_FAILED


def build_parser():
    p = argparse.ArgumentParser(prog="vortexrings", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="worker threads for the pair sums")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_config):
        if needs_config:
            sp.add_argument("--config", required=True, help="JSON configuration file")
        sp.add_argument("--out", default=None, help=f"output directory (overrides ${OUT_ENV})")
        sp.add_argument("--deterministic", action="store_true",
                        help="fixed per-target summation order, independent of thread count")
        sp.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads for the pair sums")

    common(sub.add_parser("simulate", help="run one scenario"), True)
    st = sub.add_parser("kernel-selftest", help="cross-check the kernel evaluations")
    common(st, False)
    st.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    common(sub.add_parser("convergence", help="run an epsilon ladder"), True)
    return p


COMMANDS = {"simulate": cmd_simulate, "kernel-selftest": cmd_kernel_selftest, "convergence": cmd_convergence}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigurationError("--threads must be >= 1")
            _backend.set_threads(args.threads)
        return COMMANDS[args.command](args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalAbort, DomainError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT


if __name__ == "__main__":
    sys.exit(main())
