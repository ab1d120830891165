"""Command-line interface.

Exit status is 0 on success, 1 on invalid input and 2 when the input is
valid but fails a mathematical test (inadmissible word, point outside the
parameter space).  Failures print one ``error=<kind> message=<text>`` line on
standard error.  Output files are written to a temporary name and renamed,
so a failed command leaves no partial file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Sequence

from . import combinatorics, holonomy, solver, words
from .develop import develop as develop_scene
from .develop import render_svg, tangency_audit
from .errors import CirclePackError, ValidationError, VerdictError


class CliError(Exception):
    def __init__(self, kind: str, message: str, status: int):
        super().__init__(message)
        self.kind = kind
        self.status = status


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise CliError("usage", message, 1)


def write_atomic(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def read_json(path: str | os.PathLike):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError("io", f"cannot read {path}: {exc.strerror}", 1) from None
    except json.JSONDecodeError as exc:
        raise CliError("json", f"{path}: {exc.msg} at line {exc.lineno}", 1) from None


def load_pattern(obj, base: Path | None = None, index: int = 0) -> combinatorics.SidePairingPattern:
    """A pattern from an object, a census array, or a path to either."""
    if isinstance(obj, str):
        path = Path(obj)
        if base is not None and not path.is_absolute():
            path = base / path
        obj = read_json(path)
    if isinstance(obj, list):
        if not 0 <= index < len(obj):
            raise CliError("pattern", f"pattern index {index} outside census of {len(obj)}", 1)
        obj = obj[index]
    if not isinstance(obj, dict):
        raise CliError("pattern", "pattern must be a JSON object", 1)
    return combinatorics.SidePairingPattern.from_json(obj)


def load_params(path: str) -> solver.ParameterPoint:
    obj = read_json(path)
    if not isinstance(obj, dict):
        raise CliError("params", "parameter file must hold a JSON object", 1)
    pattern = load_pattern(obj.get("pattern"), Path(path).parent)
    return solver.ParameterPoint.from_json(obj, pattern)


# --- decimal input ------------------------------------------------------------


def parse_decimal(token: str) -> tuple[float, float]:
    """Value and half-unit of the last stated fractional digit (0 for integers)."""
    token = token.strip()
    try:
        dec = Decimal(token)
    except InvalidOperation:
        raise CliError("number", f"not a decimal number: {token!r}", 1) from None
    if not dec.is_finite():
        raise CliError("number", f"not a finite number: {token!r}", 1)
    exponent = dec.as_tuple().exponent
    half_unit = 0.5 * 10.0**exponent if exponent < 0 else 0.0
    return float(dec), half_unit


def rounding_band(entries: Sequence[float], half_unit: float) -> float:
    """Bound on how far product entries move when each entry moves by ``half_unit``.

    Entry ``k`` enters the product as ``P E22 S`` with prefix ``P`` and
    suffix ``S``; the band sums ``max|P| max|S|`` over positions.
    """
    if half_unit == 0.0 or not entries:
        return 0.0
    n = len(entries)
    prefix = [words.IDENTITY]
    for x in entries:
        prefix.append(words.mat_mul(prefix[-1], words.amat(x)))
    suffix = [words.IDENTITY]
    for x in reversed(entries):
        suffix.append(words.mat_mul(words.amat(x), suffix[-1]))
    suffix.reverse()
    total = sum(max(map(abs, prefix[k])) * max(map(abs, suffix[k + 1])) for k in range(n))
    return half_unit * total


# --- subcommands ----------------------------------------------------------------


def cmd_patterns(args, out) -> int:
    if args.genus < 1:
        raise CliError("usage", "--genus must be at least 1", 1)
    pats = combinatorics.enumerate_patterns(args.genus, workers=args.workers)
    payload = dump_json([p.to_json() for p in pats])
    out.write(f"count: {len(pats)}\n")
    if args.out:
        write_atomic(args.out, payload)
    else:
        out.write(payload)
    return 0


def cmd_admissible(args, out) -> int:
    tokens = [t for t in args.vector.split(",") if t.strip()]
    if not tokens:
        raise CliError("usage", "--vector needs at least one entry", 1)
    parsed = [parse_decimal(t) for t in tokens]
    entries = [v for v, _ in parsed]
    if args.tol is not None:
        tol = args.tol
    else:
        tol = max(words.SIGN_TOL, rounding_band(entries, max(h for _, h in parsed)))
    cls = words.classify_admissibility(entries, tol=tol)
    out.write(f"{cls.kind}\n")
    detail = {
        "class": str(cls.kind),
        "entries": entries,
        "tolerance": tol,
        "margin": cls.margin,
        "product": list(words.product(entries)),
        "violation": None
        if cls.span is None
        else {"first": cls.span[0] + 1, "last": cls.span[1] + 1, "condition": cls.condition},
    }
    out.write(dump_json(detail))
    if not cls.is_admissible:
        raise CliError("inadmissible", f"condition {cls.condition} fails on entries {cls.span[0] + 1}..{cls.span[1] + 1}", 2)
    return 0


def _scene_outputs(args, point, depth: int, force: bool = False) -> dict:
    scene = develop_scene(point, depth, force=force)
    audit = tangency_audit(scene)
    center = _parse_complex(args.center)
    svg = render_svg(scene, center, args.half_width, args.min_radius, args.stroke_width)
    if args.svg:
        write_atomic(args.svg, svg)
    if getattr(args, "json", None):
        write_atomic(args.json, dump_json(scene.to_json()))
    return {
        "depth": depth,
        "interstices": len(scene.interstices),
        "circles": len(scene.circles),
        "audit": audit.to_json(),
    }


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise CliError("usage", f"expected 're,im', got {text!r}", 1)
    return complex(parse_decimal(parts[0])[0], parse_decimal(parts[1])[0])


def cmd_torus(args, out) -> int:
    x, y = parse_decimal(args.x)[0], parse_decimal(args.y)[0]
    z = solver.torus_dependent(x, y)
    point = solver.torus_point(x, y, z)
    report = solver.verify_point(point)
    result = {"x": x, "y": y, "z": z, "verdict": report.verdict, "residual": report.residual}
    if report.in_space and args.traces:
        t1, t2 = holonomy.torus_traces(x, y, z)
        result["traces"] = [[t1.real, t1.imag], [t2.real, t2.imag]]
    if report.in_space and args.develop is not None:
        result["scene"] = _scene_outputs(args, point, args.develop)
    out.write(dump_json(result))
    if not report.in_space:
        raise CliError("out-of-space", f"verdict {report.verdict}, residual {report.residual:.3e}", 2)
    return 0


def cmd_solve(args, out) -> int:
    pattern = load_pattern(args.pattern, index=args.index)
    free_obj = read_json(args.free)
    if not isinstance(free_obj, dict):
        raise CliError("free", "free-value file must hold a JSON object", 1)
    values = free_obj.get("values", free_obj)
    if not isinstance(values, dict):
        raise CliError("free", "'values' must be an object of edge labels", 1)
    dep = free_obj.get("dependent")
    layout = (
        solver.layout_for_labels(pattern, dep) if dep is not None else combinatorics.select_dependent_triple(pattern)
    )
    result = solver.solve_dependent_triple(layout, values)
    report = solver.verify_point(result.point)
    params = result.point.to_json()
    summary = {
        "dependent": dict(zip(layout.dependent_labels, result.triple)),
        "thresholds": list(result.thresholds),
        "residual": result.residual,
        "iterations": result.iterations,
        "newton_iterations": result.newton_iterations,
        "verdict": report.verdict,
    }
    if args.out:
        write_atomic(args.out, dump_json(params))
    out.write(dump_json({"solve": summary, "params": params}))
    if not report.in_space:
        raise CliError("out-of-space", f"solved point verdict {report.verdict}", 2)
    return 0


def cmd_verify(args, out) -> int:
    point = load_params(args.params)
    report = solver.verify_point(point)
    out.write(dump_json(report.to_json()))
    if not report.in_space:
        raise CliError("out-of-space", f"verdict {report.verdict}, residual {report.residual:.3e}", 2)
    return 0


def cmd_holonomy(args, out) -> int:
    p1 = load_params(args.params)
    if args.compare:
        p2 = load_params(args.compare)
        report = holonomy.rigidity_compare(p1, p2)
        out.write(dump_json(report.to_json()))
        return 0
    report = solver.verify_point(p1)
    if not report.in_space:
        raise CliError("out-of-space", f"verdict {report.verdict}", 2)
    names, gens = holonomy.comparison_generators(p1)
    traces = [g.normalized_trace for g in gens]
    out.write(dump_json({"generators": list(names), "traces": [[t.real, t.imag] for t in traces]}))
    return 0


def cmd_develop(args, out) -> int:
    if args.depth < 0:
        raise CliError("usage", "--depth must be nonnegative", 1)
    point = load_params(args.params)
    out.write(dump_json(_scene_outputs(args, point, args.depth, force=args.force)))
    return 0


def _add_render_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--center", default="0,0.5", help="viewport center as 're,im'")
    p.add_argument("--half-width", type=float, default=2.0)
    p.add_argument("--min-radius", type=float, default=1e-3)
    p.add_argument("--stroke-width", type=float, default=0.01)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="circlepack", description="Circle packings from cross-ratio parameters.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("patterns", help="enumerate side-pairing patterns")
    p.add_argument("--genus", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_patterns)

    p = sub.add_parser("admissible", help="classify a cross-ratio vector")
    p.add_argument("--vector", required=True, help="comma-separated decimals")
    p.add_argument("--tol", type=float, help="sign-test dead band (default: from input precision)")
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("torus", help="torus dependent cross ratio")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--traces", action="store_true")
    p.add_argument("--develop", type=int, metavar="DEPTH")
    p.add_argument("--svg")
    p.add_argument("--json")
    _add_render_options(p)
    p.set_defaults(func=cmd_torus)

    p = sub.add_parser("solve", help="solve the dependent triple")
    p.add_argument("--pattern", required=True)
    p.add_argument("--index", type=int, default=0, help="pattern index when the file is a census")
    p.add_argument("--free", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="verify a parameter point")
    p.add_argument("--params", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("holonomy", help="generator traces and rigidity comparison")
    p.add_argument("--params", required=True)
    p.add_argument("--compare")
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("develop", help="develop and render a packing")
    p.add_argument("--params", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--svg", required=True)
    p.add_argument("--json")
    p.add_argument("--force", action="store_true", help="develop even outside the parameter space")
    _add_render_options(p)
    p.set_defaults(func=cmd_develop)
    return parser


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "svg", None) is not None and getattr(args, "develop", 0) is None:
            raise CliError("usage", "--svg needs --develop", 1)
        return args.func(args, out)
    except CliError as exc:
        err.write(f"error={exc.kind} message={_one_line(exc)}\n")
        return exc.status
    except VerdictError as exc:
        err.write(f"error={exc.kind} message={_one_line(exc)}\n")
        return 2
    except (ValidationError, CirclePackError) as exc:
        err.write(f"error={getattr(exc, 'kind', 'error')} message={_one_line(exc)}\n")
        return 1


def _one_line(exc: Exception) -> str:
    return " ".join(str(exc).split())


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
