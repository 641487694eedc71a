"""Command-line front end: convergence studies, single-level runs, and the
built-in verification suite."""

import argparse
import sys
from pathlib import Path

from . import io
from .experiments import ExperimentSpec, run_convergence_study, run_level
from .fields import BoxK


def _parse_levels(text):
    try:
        levels = [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be integers: {text!r}")
    return levels


def _add_common(p):
    p.add_argument("--example", type=int, choices=(1, 2), default=1)
    p.add_argument("--out", type=Path, default=Path("."),
                   help="output directory (created if missing)")
    p.add_argument("--rho-scale", type=float, default=1e-3,
                   help="regularization parameter is rho-scale * h")
    p.add_argument("--q-lo", type=float, default=0.05)
    p.add_argument("--q-hi", type=float, default=10.0)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-6)


def _make_spec(args, levels, milestone_every=0):
    if args.rho_scale <= 0 or args.tol <= 0:
        raise ValueError("rho-scale and tol must be positive")
    return ExperimentSpec(example=args.example, levels=levels,
                          rho_scale=args.rho_scale,
                          K=BoxK(args.q_lo, args.q_hi),
                          max_iters=args.max_iters, tol=args.tol,
                          milestone_every=milestone_every)


def cmd_study(args):
    spec = _make_spec(args, args.levels)
    results, eoc_table = run_convergence_study(spec)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    io.write_history_csv(out / "history.csv", results,
                         include_lambda=(args.example == 2 or args.with_lambda))
    io.write_eoc_csv(out / "eoc.csv", results, eoc_table)
    for r in results:
        io.write_run_json(out / f"run_ell{r.ell}.json", r, spec)
    print(f"wrote {out / 'history.csv'} and {out / 'eoc.csv'}")
    return 0


def cmd_solve(args):
    milestone_every = 100 if args.dump_milestones else 0
    spec = _make_spec(args, [args.ell], milestone_every=milestone_every)
    result = run_level(spec, args.ell)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    io.write_run_json(out / "run.json", result, spec)
    io.write_qfield_csv(out / "qfield.csv", result.record.final_Q)

    from .mesh import build_uniform_mesh
    mesh = build_uniform_mesh(args.ell)
    io.write_state_csv(out / "state.csv", mesh, result.record.final_state)
    if args.dump_milestones:
        io.write_milestones_csv(out / "milestones.csv", result.milestones)
    if args.dump_mesh:
        io.write_mesh_csv(out / "nodes.csv", out / "tris.csv", mesh)
    if args.dump_vtk:
        io.write_vtk(out / "out.vtk", mesh, result.record.final_state,
                     result.record.final_Q)
    tol = result.record.tolerance[-1]
    print(f"ell={args.ell}: {result.record.iterations} iterations, "
          f"stop={result.record.stop_reason}, tolerance={tol:.5e}, "
          f"Gamma={result.metrics['Gamma']:.5e}")
    return 0


def cmd_check(args):
    from .checks import run_all_checks
    failed = 0
    for name, ok, detail in run_all_checks():
        status = "PASS" if ok else "FAIL"
        print(f"{status}  {name}: {detail}")
        failed += not ok
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qident",
        description="Identify a symmetric diffusion matrix from noisy state "
                    "observations by projected-gradient minimization of a "
                    "convex energy functional.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("study", help="multi-level convergence study")
    _add_common(p)
    p.add_argument("--levels", type=_parse_levels, default=[6, 12, 24, 48, 96])
    p.add_argument("--with-lambda", action="store_true",
                   help="include the H1-seminorm state error column for example 1")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("solve", help="single-level run with field/state dumps")
    _add_common(p)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--dump-milestones", action="store_true")
    p.add_argument("--dump-mesh", action="store_true")
    p.add_argument("--dump-vtk", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="run the built-in verification suite")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
