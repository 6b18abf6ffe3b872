"""Command-line front end.

    varint tableau --kind gauss-legendre -s 2 --format json
    varint simulate --method sprk --kind gauss-legendre -s 2 --system pendulum \\
        --q 1 --p 0 --h 0.1 --steps 10 --format csv
    varint converge --method sg --kind gauss-legendre -s 2 \\
        --system harmonic-oscillator --q 1 --p 0 -T 1 --h-list 0.2,0.1,0.05,0.025
    varint check-symplectic --method sprk --kind gauss-legendre -s 2 \\
        --system pendulum --q 1 --p 0 --h 0.1

Exit status is 0 on success, 2 on a usage error and 1 when the nonlinear
solver fails (partial output is still written).
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys

from . import analysis
from .collocation import QuadratureKind, tableau
from .exceptions import (IntegrationFailed, NonConvergence, OrderUnresolvable,
                         StageCountTooSmall, UnsupportedStageCount, ZeroWeight)
from .integrators import Family, Method, integrate
from .mechanics import SYSTEMS, PhaseState, make_system
from .newton import SolverConfig


def fmt(x):
    """Shortest repr that round-trips the double exactly."""
    return repr(float(x))


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")


def _kind(text):
    try:
        return QuadratureKind.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="varint", allow_abbrev=False,
        description="Higher-order variational integrators (spRK and sG).")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_method=True, with_system=True):
        p.add_argument("--kind", type=_kind, default=QuadratureKind.GAUSS_LEGENDRE,
                       help="collocation family: " + ", ".join(k.value for k in QuadratureKind))
        p.add_argument("-s", "--stages", dest="s", type=int, default=2, help="stage count")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--output", default=None, help="output path (default stdout)")
        if with_method:
            p.add_argument("--method", choices=("sprk", "sg"), default="sprk")
        if with_system:
            p.add_argument("--system", choices=sorted(SYSTEMS), required=True)
            p.add_argument("--params", type=_floats, default=[],
                           help="system parameters, comma separated")
            p.add_argument("--q", type=_floats, required=True, help="initial positions")
            p.add_argument("--p", type=_floats, required=True, help="initial momenta")
            p.add_argument("--tol", type=float, default=1e-12)
            p.add_argument("--max-iter", type=int, default=50)

    p = sub.add_parser("tableau", allow_abbrev=False, help="dump collocation coefficients")
    common(p, with_method=False, with_system=False)

    p = sub.add_parser("simulate", allow_abbrev=False, help="integrate a trajectory")
    common(p)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)

    p = sub.add_parser("converge", allow_abbrev=False, help="convergence-order study")
    common(p)
    p.add_argument("-T", dest="T", type=float, required=True, help="final time")
    p.add_argument("--h-list", type=_floats, required=True)

    p = sub.add_parser("check-symplectic", allow_abbrev=False,
                       help="finite-difference symplecticity defect of one step")
    common(p)
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--fd-step", type=float, default=1e-5)
    return parser


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _cmd_tableau(args, out):
    T = tableau(args.kind, args.s)
    if args.format == "csv":
        w = _writer(out)
        w.writerow(["field", "i", "j", "value"])
        for name in ("c", "b", "bbar", "alpha", "beta"):
            for i, v in enumerate(getattr(T, name)):
                w.writerow([name, i, "", fmt(v)])
        for name in ("a", "abar", "dmat"):
            for (i, j), v in _enumerate2(getattr(T, name)):
                w.writerow([name, i, j, fmt(v)])
        w.writerow(["gamma", "", "", fmt(T.gamma)])
    else:
        json.dump(T.to_dict(), out, indent=2)
        out.write("\n")
    return 0


def _enumerate2(m):
    for i, row in enumerate(m):
        for j, v in enumerate(row):
            yield (i, j), v


def _trajectory_rows(traj):
    rows = []
    for k in range(len(traj)):
        if k == 0:
            iters, res = 0, 0.0
        else:
            rep = traj.reports[k - 1]
            iters, res = rep.iterations, rep.final_residual
        rows.append((traj.times[k], traj.q[k], traj.p[k], traj.energies[k], iters, res))
    return rows


def _emit_trajectory(traj, n, args, out):
    header = (["t"] + [f"q{i}" for i in range(n)] + [f"p{i}" for i in range(n)]
              + ["energy", "newton_iters", "residual"])
    rows = _trajectory_rows(traj)
    if args.format == "json":
        recs = []
        for t, q, p, e, it, res in rows:
            recs.append({"t": float(t), "q": q.tolist(), "p": p.tolist(), "energy": float(e),
                         "newton_iters": it, "residual": float(res)})
        json.dump({"method": args.method, "kind": args.kind.value, "s": args.s,
                   "system": args.system, "h": args.h, "rows": recs}, out, indent=2)
        out.write("\n")
        return
    w = _writer(out)
    w.writerow(header)
    for t, q, p, e, it, res in rows:
        w.writerow([fmt(t)] + [fmt(v) for v in q] + [fmt(v) for v in p]
                   + [fmt(e), str(it), fmt(res)])


def _cmd_simulate(args, system, out):
    method = Method.create(args.method, args.kind, args.s, args.h)
    cfg = SolverConfig(tol=args.tol, max_iter=args.max_iter)
    initial = PhaseState(args.q, args.p)
    try:
        traj = integrate(system, method, initial, args.steps, cfg)
    except IntegrationFailed as exc:
        _emit_trajectory(exc.trajectory, system.n, args, out)
        print(f"varint: solver failed at step {exc.step} (t={exc.step * args.h!r}): "
              f"{exc.report}", file=sys.stderr)
        return 1
    _emit_trajectory(traj, system.n, args, out)
    return 0


def _cmd_converge(args, system, out):
    cfg = SolverConfig(tol=args.tol, max_iter=args.max_iter)
    initial = PhaseState(args.q, args.p)
    try:
        study = analysis.convergence_order(system, args.method, args.kind, args.s,
                                           initial, args.T, args.h_list, cfg)
    except OrderUnresolvable as exc:
        print(f"varint: {exc}", file=sys.stderr)
        return 1
    if args.format == "json":
        doc = {"method": args.method, "kind": args.kind.value, "s": args.s,
               "system": args.system, "T": args.T, **study.to_dict()}
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        w = _writer(out)
        w.writerow(["h", "error"])
        for h, e in zip(study.h_values, study.errors):
            w.writerow([fmt(h), fmt(e)])
        out.write(f"# slope={fmt(study.slope)}\n")
    return 0


def _cmd_symplectic(args, system, out):
    method = Method.create(args.method, args.kind, args.s, args.h)
    cfg = SolverConfig(tol=args.tol, max_iter=args.max_iter)
    rep = analysis.symplecticity_defect(system, method, PhaseState(args.q, args.p),
                                        args.fd_step, cfg)
    if args.format == "csv":
        w = _writer(out)
        w.writerow(["defect", "fd_step", "h"])
        w.writerow([fmt(rep.defect), fmt(rep.fd_step), fmt(rep.h)])
    else:
        json.dump({"defect": rep.defect, "fd_step": rep.fd_step, "h": rep.h}, out)
        out.write("\n")
    return 0


def _validate(args, parser):
    kind = args.kind
    if not kind.min_stages <= args.s <= 10:
        parser.error(f"argument -s: {kind.value} supports 1 <= s <= 10"
                     + (" and s >= 2" if kind.min_stages == 2 else "") + f", got {args.s}")
    if args.command == "tableau":
        return None
    if args.method == "sg" and args.s < 2:
        parser.error(f"argument -s: the sG method needs s >= 2, got {args.s}")
    if args.tol <= 0:
        parser.error("argument --tol: must be positive")
    if args.max_iter < 1:
        parser.error("argument --max-iter: must be >= 1")
    try:
        system = make_system(args.system, args.params)
    except (ValueError, TypeError) as exc:
        parser.error(f"argument --params: {exc}")
    if len(args.q) != system.n:
        parser.error(f"argument --q: system {args.system} needs {system.n} values, got {len(args.q)}")
    if len(args.p) != system.n:
        parser.error(f"argument --p: system {args.system} needs {system.n} values, got {len(args.p)}")
    if getattr(args, "h", 1.0) <= 0:
        parser.error("argument --h: must be positive")
    if args.command == "simulate" and args.steps < 1:
        parser.error("argument --steps: must be >= 1")
    if args.command == "converge":
        hs = args.h_list
        if len(hs) < 3:
            parser.error("argument --h-list: need at least 3 step sizes")
        if any(b >= a for a, b in zip(hs, hs[1:])) or min(hs) <= 0:
            parser.error("argument --h-list: step sizes must be positive and strictly decreasing")
        for h in hs:
            n = round(args.T / h)
            if n < 1 or abs(n * h - args.T) > 1e-9 * max(1.0, abs(args.T)):
                parser.error(f"argument --h-list: T={args.T} is not a multiple of h={h}")
    if args.command == "check-symplectic" and not 0 < args.fd_step < 1:
        parser.error("argument --fd-step: must lie in (0, 1)")
    return system


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "json" if args.command in ("tableau", "check-symplectic") else "csv"
    system = _validate(args, parser)

    buf = io.StringIO()
    try:
        if args.command == "tableau":
            code = _cmd_tableau(args, buf)
        elif args.command == "simulate":
            code = _cmd_simulate(args, system, buf)
        elif args.command == "converge":
            code = _cmd_converge(args, system, buf)
        else:
            code = _cmd_symplectic(args, system, buf)
    except (UnsupportedStageCount, StageCountTooSmall, ZeroWeight) as exc:
        parser.error(str(exc))
    except NonConvergence as exc:
        print(f"varint: solver failure: {exc}", file=sys.stderr)
        code = 1
    with _sink(args.output) as out:
        out.write(buf.getvalue())
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
