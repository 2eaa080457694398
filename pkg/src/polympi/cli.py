"""Command line: ``mpi run``, ``mpi check`` and ``mpi verify``.

Exit codes: 0 converged (or, for ``verify``, invariance certified),
2 unsuccessful / inconclusive, 3 empty, 4 invalid input, 5 I/O failure,
6 invariance refuted.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import replace
from pathlib import Path

from .engine import EXPLICIT, IMPLICIT, compute_mpi, verify_invariance
from .globopt import check_bounded, check_nonempty, find_fixed_point
from .io import (EXIT_CODES, EXIT_INVALID, EXIT_IO, ProblemFileError, load_problem, omega_from_trace,
                 rasterize, read_trace, write_raster, write_trace)
from .poly import DimensionError

EXIT_INCONCLUSIVE = 2
EXIT_REFUTED = 6

log = logging.getLogger("polympi")


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return f"{x:.9g}"


def _apply_overrides(spec, args):
    p = spec.problem
    changes = {}
    if getattr(args, "mode", None):
        changes["mode"] = args.mode
    if getattr(args, "epsilon", None) is not None:
        changes["epsilon"] = args.epsilon
    if getattr(args, "kmax", None) is not None:
        changes["k_max"] = args.kmax
    if getattr(args, "reduce", False):
        changes["reduction"] = True
    if getattr(args, "grid", None) is not None:
        changes["grid"] = args.grid
    solver = p.solver
    if getattr(args, "deterministic", False):
        solver = replace(solver, deterministic=True)
    if getattr(args, "budget", None) is not None:
        solver = replace(solver, max_nodes=args.budget)
    if getattr(args, "gap", None) is not None:
        solver = replace(solver, gap=args.gap)
    changes["solver"] = solver
    return replace(spec, problem=replace(p, **changes))


def cmd_run(args) -> int:
    spec = _apply_overrides(load_problem(args.problem), args)
    problem = spec.problem
    if args.raster and problem.grid is None:
        raise ProblemFileError("--raster needs a grid resolution (--grid N or options.grid)")
    if args.raster and problem.n != 2:
        raise ProblemFileError("rasters are only available for 2-D problems")
    t0 = time.perf_counter()
    result = compute_mpi(problem)
    elapsed = time.perf_counter() - t0
    for r in result.trace:
        print(f"k={r.k} constraints={r.constraint_count} nonempty={r.emptiness} "
              f"delta={_fmt(r.delta)} passed={r.passed} time={r.wall_time:.2f}s")
    print(f"status={result.status} k_final={result.k_final} time={elapsed:.2f}s")
    write_trace(result, args.trace, spec)
    if args.raster:
        box = spec.raster_box or problem.domain_box
        raster = rasterize(result, box, problem.grid)
        write_raster(raster, args.raster)
        print("member counts: " + " ".join(f"X{k}={c}" for k, c in enumerate(raster.counts())))
        if args.figure:
            from .plotting import plot_raster
            plot_raster(raster, args.figure, title=f"{result.status}, k = {result.k_final}")
    elif args.figure:
        raise ProblemFileError("--figure needs --raster")
    return EXIT_CODES[result.status]


def cmd_check(args) -> int:
    spec = load_problem(args.problem)
    p = spec.problem
    X0 = p.constraint_set
    report = {}
    ne = check_nonempty(X0, p.domain_box, p.solver)
    print(f"nonempty: {ne.status}" + (f" witness=({', '.join(map(str, ne.witness))})" if ne.witness else ""))
    report["nonempty"] = {"status": ne.status, "witness": [str(v) for v in ne.witness] if ne.witness else None}
    bd = check_bounded(X0, p.domain_box, p.solver)
    dirs = []
    for d in bd.directions:
        print(f"direction ({', '.join(f'{c:.4g}' for c in d.direction)}): max <= {_fmt(d.maximum)} "
              f"attained {_fmt(d.attained)} touches_box_boundary={d.touches_box_boundary} [{d.status}]")
        dirs.append({"direction": list(d.direction), "maximum": d.maximum, "attained": d.attained,
                     "touches_box_boundary": d.touches_box_boundary, "status": d.status})
    bounded = bd.bounded
    print(f"bounded within domain box: {'yes' if bounded else 'inconclusive'}")
    report["bounded"] = {"verdict": bounded, "directions": dirs}
    fp = find_fixed_point(p.f, X0, p.domain_box, p.solver)
    exact_fixed = fp.value == 0
    w = f"({', '.join(map(str, fp.witness))})" if fp.witness else "-"
    print(f"fixed point residual: lower={_fmt(fp.lower)} upper={_fmt(fp.upper)} witness={w} "
          f"exact_fixed_point={exact_fixed} [{fp.status}]")
    report["fixed_point"] = {"lower": fp.lower, "upper": fp.upper, "status": fp.status,
                             "witness": [str(v) for v in fp.witness] if fp.witness else None,
                             "residual": str(fp.value) if fp.value is not None else None,
                             "exact_fixed_point": exact_fixed}
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n")
    if ne.status == "empty_certified":
        return EXIT_CODES["empty"]
    return 0


def cmd_verify(args) -> int:
    spec = load_problem(args.problem)
    p = spec.problem
    if args.budget is not None:
        p = replace(p, solver=replace(p.solver, max_nodes=args.budget))
    doc = read_trace(args.trace)
    S = omega_from_trace(doc, p.n)
    if S is None:
        print(f"trace has no invariant set (status {doc.get('status')})")
        return EXIT_INCONCLUSIVE
    rep = verify_invariance(S, p.f, p)
    worst_inv = min(b.lower for b in rep.invariance)
    worst_cont = min(b.lower for b in rep.containment)
    print(f"constraints: {len(S)}  min over S of g(f(x)) >= {_fmt(worst_inv)}  "
          f"min over S of phi0(x) >= {_fmt(worst_cont)}")
    verdict = {True: "invariant (certified)", False: "NOT invariant (counterexample)", None: "inconclusive"}
    print(f"verdict: {verdict[rep.holds]}")
    if rep.holds is True:
        return 0
    return EXIT_REFUTED if rep.holds is False else EXIT_INCONCLUSIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mpi", description="Maximal positively invariant sets of polynomial maps.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compute the maximal positively invariant set")
    run.add_argument("problem")
    run.add_argument("--trace", required=True, help="JSON trace output path")
    run.add_argument("--raster", help="CSV membership raster output path (2-D only)")
    run.add_argument("--grid", type=int, help="raster resolution per axis")
    run.add_argument("--figure", help="PNG figure of the raster")
    run.add_argument("--mode", choices=[EXPLICIT, IMPLICIT])
    run.add_argument("--epsilon", type=float)
    run.add_argument("--kmax", type=int)
    run.add_argument("--reduce", action="store_true", help="drop redundant constraints each iteration")
    run.add_argument("--deterministic", action="store_true")
    run.add_argument("--budget", type=int, help="node budget per minimization")
    run.add_argument("--gap", type=float, help="absolute gap tolerance")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="nonemptiness, boundedness and fixed-point report")
    check.add_argument("problem")
    check.add_argument("--json", help="also write the report as JSON")
    check.set_defaults(func=cmd_check)

    verify = sub.add_parser("verify", help="audit the invariant set recorded in a trace")
    verify.add_argument("problem")
    verify.add_argument("trace")
    verify.add_argument("--budget", type=int, help="node budget per minimization")
    verify.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ProblemFileError, DimensionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
