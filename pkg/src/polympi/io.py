"""Problem files (YAML), trace files (JSON) and membership rasters (CSV).

A problem file looks like::

    variables: 2
    dynamics:
      - 1/2*x1 - x1^2 - x2
      - 1/2*x1^2 + 1/2*x2 - (1/2*x1 - x1^2 - x2)^2
    constraints:
      - 1 - (x1^2 + x2^2)
    domain_box:
      - [-2, 2]
      - [-2, 2]
    options:
      epsilon: 0
      k_max: 10
      mode: explicit        # or implicit
      reduction: false
      grid: 201             # raster resolution, 2-D only
      raster_box: [[-1.05, 1.05], [-1.05, 1.05]]
      solver: {gap: 1.0e-6, budget: 200000, min_width: 1.0e-10, deterministic: true}

Box endpoints may be integers, decimals (read exactly, so ``-1.05`` is
``-21/20``) or quoted fractions like ``"-21/20"``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import yaml

from .engine import EXPLICIT, IMPLICIT, MpiResult, Problem
from .globopt import CertifiedBound, SolverConfig
from .interval import Box
from .poly import DimensionError, PolyMap, Polynomial, PolynomialSyntaxError
from .semialg import ImplicitChain, SemialgebraicSet, first_exit

TRACE_FORMAT = "polympi-trace/1"

_TOP_KEYS = {"variables", "dynamics", "constraints", "domain_box", "options"}
_OPTION_KEYS = {"epsilon", "k_max", "mode", "reduction", "grid", "raster_box", "solver"}
_SOLVER_KEYS = {"gap", "budget", "min_width", "deterministic"}


class ProblemFileError(ValueError):
    """Invalid problem document; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class ProblemSpec:
    """A parsed problem plus the raster settings that travel with it."""

    problem: Problem
    raster_box: Box | None = None

    @property
    def grid(self) -> int | None:
        return self.problem.grid


def _plain(node: yaml.Node, marks: dict, path: tuple):
    marks[path] = (node.start_mark.line + 1, node.start_mark.column + 1)
    if isinstance(node, yaml.MappingNode):
        out = {}
        for knode, vnode in node.value:
            key = knode.value
            if key in out:
                raise ProblemFileError(f"duplicate key {key!r}", knode.start_mark.line + 1, knode.start_mark.column + 1)
            marks[path + (key, "__key__")] = (knode.start_mark.line + 1, knode.start_mark.column + 1)
            out[key] = _plain(vnode, marks, path + (key,))
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_plain(v, marks, path + (i,)) for i, v in enumerate(node.value)]
    # scalars: resolve with the safe constructor but keep decimals exact
    if node.tag == "tag:yaml.org,2002:float":
        return ("float", node.value)
    if node.tag == "tag:yaml.org,2002:str":
        return node.value
    return yaml.constructor.SafeConstructor().construct_object(node)


def _exact(value, where) -> Fraction:
    if isinstance(value, tuple) and value[0] == "float":
        text = value[1].replace("_", "")
        try:
            return Fraction(text)
        except ValueError:
            raise ProblemFileError(f"not a finite number: {text!r}", *where) from None
    if isinstance(value, bool):
        raise ProblemFileError("expected a number, got a boolean", *where)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ProblemFileError(f"not a rational number: {value!r}", *where) from None
    raise ProblemFileError(f"expected a number, got {type(value).__name__}", *where)


def _number(value, where) -> float:
    return float(_exact(value, where))


def parse_problem(text: str) -> ProblemSpec:
    """Parse and validate a problem document."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ProblemFileError(f"YAML syntax error: {exc.problem}",
                               mark.line + 1 if mark else None, mark.column + 1 if mark else None) from None
    if node is None or not isinstance(node, yaml.MappingNode):
        raise ProblemFileError("problem file must be a mapping", 1, 1)
    marks: dict = {}
    doc = _plain(node, marks, ())

    def at(*path):
        return marks.get(path, (None, None))

    for key in doc:
        if key not in _TOP_KEYS:
            raise ProblemFileError(f"unknown key {key!r}", *marks[(key, "__key__")])
    for key in ("variables", "dynamics", "constraints", "domain_box"):
        if key not in doc:
            raise ProblemFileError(f"missing required section {key!r}", 1, 1)

    n = doc["variables"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ProblemFileError("'variables' must be a positive integer", *at("variables"))

    def polys(section):
        items = doc[section]
        if not isinstance(items, list) or not items:
            raise ProblemFileError(f"{section!r} must be a nonempty list of polynomials", *at(section))
        out = []
        for i, item in enumerate(items):
            if isinstance(item, tuple):
                item = item[1]
            if isinstance(item, (int, float)) and not isinstance(item, bool):
                item = str(item)
            if not isinstance(item, str):
                raise ProblemFileError(f"{section}[{i}] must be a polynomial string", *at(section, i))
            try:
                out.append(Polynomial.parse(item, n))
            except PolynomialSyntaxError as exc:
                line, col = at(section, i)
                raise ProblemFileError(f"{section}[{i}]: {exc}", line, col) from None
            except DimensionError as exc:
                line, col = at(section, i)
                raise ProblemFileError(f"dimension error in {section}[{i}]: {exc}", line, col) from None
        return PolyMap(out, n)

    f = polys("dynamics")
    if len(f) != n:
        raise ProblemFileError(f"'dynamics' needs {n} components, got {len(f)}", *at("dynamics"))
    phi0 = polys("constraints")
    box = _parse_box(doc["domain_box"], n, ("domain_box",), at)

    opts = doc.get("options", {}) or {}
    if not isinstance(opts, dict):
        raise ProblemFileError("'options' must be a mapping", *at("options"))
    for key in opts:
        if key not in _OPTION_KEYS:
            raise ProblemFileError(f"unknown option {key!r}", *marks[("options", key, "__key__")])
    solver_doc = opts.get("solver", {}) or {}
    if not isinstance(solver_doc, dict):
        raise ProblemFileError("'options.solver' must be a mapping", *at("options", "solver"))
    for key in solver_doc:
        if key not in _SOLVER_KEYS:
            raise ProblemFileError(f"unknown solver option {key!r}", *marks[("options", "solver", key, "__key__")])

    try:
        solver = SolverConfig(
            gap=_number(solver_doc.get("gap", ("float", "1e-6")), at("options", "solver", "gap")),
            max_nodes=_int(solver_doc.get("budget", 200_000), at("options", "solver", "budget")),
            min_width=_number(solver_doc.get("min_width", ("float", "1e-10")), at("options", "solver", "min_width")),
            deterministic=_bool(solver_doc.get("deterministic", True), at("options", "solver", "deterministic")),
        )
    except ValueError as exc:
        if isinstance(exc, ProblemFileError):
            raise
        raise ProblemFileError(f"invalid solver options: {exc}", *at("options", "solver")) from None
    mode = opts.get("mode", EXPLICIT)
    if mode not in (EXPLICIT, IMPLICIT):
        raise ProblemFileError(f"mode must be 'explicit' or 'implicit', got {mode!r}", *at("options", "mode"))
    grid = opts.get("grid")
    if grid is not None:
        grid = _int(grid, at("options", "grid"))
    raster_box = None
    if "raster_box" in opts:
        raster_box = _parse_box(opts["raster_box"], n, ("options", "raster_box"), at)
    try:
        problem = Problem(
            f=f, phi0=phi0, domain_box=box,
            epsilon=_number(opts.get("epsilon", 0), at("options", "epsilon")),
            k_max=_int(opts.get("k_max", 10), at("options", "k_max")),
            mode=mode,
            reduction=_bool(opts.get("reduction", False), at("options", "reduction")),
            solver=solver,
            grid=grid,
        )
    except ProblemFileError:
        raise
    except (ValueError, DimensionError) as exc:
        raise ProblemFileError(str(exc), *at("options")) from None
    return ProblemSpec(problem, raster_box)


def _int(value, where) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ProblemFileError(f"expected an integer, got {value!r}", *where)
    return value


def _bool(value, where) -> bool:
    if not isinstance(value, bool):
        raise ProblemFileError(f"expected true or false, got {value!r}", *where)
    return value


def _parse_box(value, n, path, at) -> Box:
    if not isinstance(value, list) or len(value) != n:
        raise ProblemFileError(f"box must list {n} [lo, hi] pairs", *at(*path))
    sides = []
    for i, side in enumerate(value):
        if not isinstance(side, list) or len(side) != 2:
            raise ProblemFileError("each box side must be a [lo, hi] pair", *at(*path, i))
        lo = _exact(side[0], at(*path, i, 0))
        hi = _exact(side[1], at(*path, i, 1))
        if lo > hi:
            raise ProblemFileError(f"box side [{lo}, {hi}] has lo > hi", *at(*path, i))
        sides.append((lo, hi))
    return Box(sides)


def load_problem(path: str | Path) -> ProblemSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"cannot read problem file {path}: {exc.strerror or exc}") from exc
    try:
        return parse_problem(text)
    except ProblemFileError as exc:
        raise ProblemFileError(f"{path}: {exc}", exc.line, exc.column) from None


def _fraction_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def problem_to_dict(spec: ProblemSpec | Problem) -> dict:
    if isinstance(spec, Problem):
        spec = ProblemSpec(spec)
    p = spec.problem
    opts: dict[str, Any] = {
        "epsilon": p.epsilon,
        "k_max": p.k_max,
        "mode": p.mode,
        "reduction": p.reduction,
        "solver": {
            "gap": p.solver.gap,
            "budget": p.solver.max_nodes,
            "min_width": p.solver.min_width,
            "deterministic": p.solver.deterministic,
        },
    }
    if p.grid is not None:
        opts["grid"] = p.grid
    if spec.raster_box is not None:
        opts["raster_box"] = [[_fraction_text(a), _fraction_text(b)] for a, b in spec.raster_box.bounds()]
    return {
        "variables": p.n,
        "dynamics": p.f.to_strings(),
        "constraints": p.phi0.to_strings(),
        "domain_box": [[_fraction_text(a), _fraction_text(b)] for a, b in p.domain_box.bounds()],
        "options": opts,
    }


def emit_problem(spec: ProblemSpec | Problem) -> str:
    return yaml.safe_dump(problem_to_dict(spec), sort_keys=False, default_flow_style=None)


# traces


def _num(x: float | None):
    if x is None or not math.isfinite(x):
        return None
    return float(x)


def _point(x) -> list[str] | None:
    return None if x is None else [_fraction_text(v) for v in x]


def _bound_dict(b: CertifiedBound) -> dict:
    return {
        "lower": _num(b.lower),
        "upper": _num(b.upper),
        "status": b.status,
        "nodes": b.nodes,
        "witness": _point(b.witness),
        "value": None if b.value is None else _fraction_text(b.value),
    }


def describe_iterate(X) -> dict:
    if isinstance(X, ImplicitChain):
        return {"representation": "implicit", "depth": X.depth, "constraints": X.explicit().to_strings()}
    return {"representation": "explicit", "constraints": X.to_strings()}


EXIT_CODES = {"converged": 0, "unsuccessful": 2, "empty": 3}
EXIT_INVALID = 4
EXIT_IO = 5


def trace_dict(result: MpiResult, spec: ProblemSpec | None = None) -> dict:
    spec = spec or ProblemSpec(result.problem)
    return {
        "format": TRACE_FORMAT,
        "problem": problem_to_dict(spec),
        "status": result.status,
        "exit_code": EXIT_CODES[result.status],
        "k_final": result.k_final,
        "last_nonempty": result.last_nonempty,
        "iterations": [
            {
                "k": r.k,
                "constraint_count": r.constraint_count,
                "emptiness": r.emptiness,
                "emptiness_witness": _point(r.emptiness_witness),
                "delta": _num(r.delta),
                "passed": r.passed,
                "wall_time": r.wall_time,
                "bounds": [_bound_dict(b) for b in r.bounds],
            }
            for r in result.trace
        ],
        "omega": describe_iterate(result.omega) if result.omega is not None else None,
        "final_iterate": describe_iterate(result.final),
    }


def write_trace(result: MpiResult, path: str | Path, spec: ProblemSpec | None = None) -> None:
    path = Path(path)
    try:
        path.write_text(json.dumps(trace_dict(result, spec), indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write trace file {path}: {exc.strerror or exc}") from exc


def read_trace(path: str | Path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read trace file {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: malformed trace: {exc.msg}", exc.lineno, exc.colno) from None
    if doc.get("format") != TRACE_FORMAT:
        raise ProblemFileError(f"{path}: not a {TRACE_FORMAT} document")
    return doc


def omega_from_trace(doc: dict, n: int) -> SemialgebraicSet | None:
    omega = doc.get("omega")
    if omega is None:
        return None
    return SemialgebraicSet.parse(omega["constraints"], n)


# rasters


def grid_nodes(box: Box, resolution: int) -> list[tuple[Fraction, Fraction]]:
    """Row-major lattice: x2 varies slowest, x1 fastest."""
    if box.n != 2:
        raise DimensionError("rasters are only defined for planar problems")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    (a1, b1), (a2, b2) = box.bounds()
    xs = [a1 + (b1 - a1) * i / (resolution - 1) for i in range(resolution)]
    ys = [a2 + (b2 - a2) * j / (resolution - 1) for j in range(resolution)]
    return [(x, y) for y in ys for x in xs]


@dataclass
class Raster:
    nodes: list[tuple[Fraction, Fraction]]
    flags: list[list[int]]  # flags[row][k]
    k_last: int

    def counts(self) -> list[int]:
        return [sum(r[k] for r in self.flags) for k in range(self.k_last + 1)]


def rasterize(result: MpiResult, box: Box, resolution: int) -> Raster:
    """Exact membership of every grid node in every iterate ``X_0..X_k``.

    Node ``x`` lies in ``X_k`` exactly when ``phi0(f^j(x)) >= 0`` for all
    ``j <= k``, which is decided by iterating ``f`` in rational arithmetic.
    """
    problem = result.problem
    k_last = len(result.iterates) - 1
    nodes = grid_nodes(box, resolution)
    flags = []
    for x in nodes:
        exit_at = first_exit(problem.phi0, problem.f, x, k_last)
        flags.append([1 if exit_at > k else 0 for k in range(k_last + 1)])
    return Raster(nodes, flags, k_last)


def write_raster(raster: Raster, path: str | Path) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x1", "x2"] + [f"X{k}" for k in range(raster.k_last + 1)])
            for (x, y), row in zip(raster.nodes, raster.flags):
                w.writerow([repr(float(x)), repr(float(y))] + row)
    except OSError as exc:
        raise OSError(f"cannot write raster file {path}: {exc.strerror or exc}") from exc


def read_raster(path: str | Path) -> tuple[list[str], list[list[float]]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(v) for v in r] for r in rows[1:]]
