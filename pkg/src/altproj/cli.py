"""Command-line front end.

Subcommands: ``run`` (alternating projections from a JSON experiment spec,
emitting a trace CSV and a report JSON), ``bound`` (constants and step
bounds for a polyhedron / half-space problem), ``lp`` (projection-based LP
solve), and ``verify`` (self-check suites).

Exit codes: 0 success / certified, 2 run finished without certifying,
64 usage or parse error, 65 not a polyhedron / half-space pair,
66 lower bound not strict, 1 any other error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import certify, engine, lp, verify
from .errors import AltprojError, LowerBoundNotStrict, NotPolyhedralPair
from .linalg import as_point
from .sets import HalfSpace, Polyhedron, set_from_json

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_CERTIFIED = 2
EXIT_USAGE = 64
EXIT_NOT_POLYHEDRAL = 65
EXIT_BOUND_NOT_STRICT = 66


class _Parser(argparse.ArgumentParser):
    # Usage problems must exit 64; argparse's default of 2 collides with
    # the "finished without certifying" code.
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_trace_csv(trace: engine.Trace, path: Path) -> None:
    dim = trace.iterates[0][2].shape[0]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "label", *(f"x{i}" for i in range(dim)), "gap"])
        for idx, label, point in trace.iterates:
            gap = _fmt(trace.gaps[idx - 1]) if idx >= 1 else ""
            writer.writerow([idx, label, *(_fmt(v) for v in point), gap])


def cmd_run(args) -> int:
    try:
        spec = _load_json(args.spec)
        set_a = set_from_json(spec["setA"])
        set_b = set_from_json(spec["setB"])
        x0 = as_point(spec["x0"])
        max_iters = int(args.max_iters or spec.get("max_iters", 1000))
        cert_tol = float(spec.get("cert_tol", 1e-8))
        outputs = spec.get("outputs", {})
    except (OSError, json.JSONDecodeError, KeyError, ValueError, AltprojError) as exc:
        print(f"error: cannot parse experiment spec: {exc}", file=sys.stderr)
        return EXIT_USAGE

    trace = engine.run(set_a, set_b, x0, max_iters=max_iters, cert_tol=cert_tol)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.spec).stem
    csv_path = Path(outputs.get("trace_csv", out_dir / f"{stem}_trace.csv"))
    report_path = Path(outputs.get("report_json", out_dir / f"{stem}_report.json"))
    _write_trace_csv(trace, csv_path)

    report = trace.to_json_dict()
    del report["iterates"]
    del report["gaps"]
    report["trace_csv"] = str(csv_path)
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(_dump_json(report) + "\n")
    print(_dump_json(report))
    if trace.stop_reason is engine.StopReason.CERTIFIED:
        return EXIT_OK
    return EXIT_NOT_CERTIFIED


def cmd_bound(args) -> int:
    try:
        spec = _load_json(args.problem)
        set_a = set_from_json(spec["setA"])
        set_b = set_from_json(spec["setB"])
        x0 = as_point(spec["x0"])
    except (OSError, json.JSONDecodeError, KeyError, ValueError, AltprojError) as exc:
        print(f"error: cannot parse bound problem: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not isinstance(set_a, HalfSpace) or not isinstance(set_b, Polyhedron):
        print(
            "error: bound requires setA to be a half-space and setB a polyhedron",
            file=sys.stderr,
        )
        return EXIT_NOT_POLYHEDRAL
    report = certify.bound_report(set_b, set_a, x0)
    print(_dump_json(report.to_json_dict()))
    return EXIT_OK


def cmd_lp(args) -> int:
    try:
        spec = _load_json(args.problem)
        if args.auto_bound:
            poly = Polyhedron(np.asarray(spec["A"], dtype=float), as_point(spec["b"]))
            optimum, _ = lp.vertex_oracle(poly, as_point(spec["c"]))
            problem = lp.problem_from_json(spec, M=optimum - 1.0)
        else:
            problem = lp.problem_from_json(spec)
    except (OSError, json.JSONDecodeError, KeyError, ValueError, AltprojError) as exc:
        print(f"error: cannot parse LP problem: {exc}", file=sys.stderr)
        return EXIT_USAGE
    outcome = lp.solve_lp(problem, strategy=args.strategy)
    trace_csv = None
    if args.out is not None and outcome.trace is not None:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{Path(args.problem).stem}_trace.csv"
        _write_trace_csv(outcome.trace, path)
        trace_csv = str(path)
    print(_dump_json(lp.outcome_to_json(outcome, trace_csv)))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = [args.suite] if args.suite else []
    try:
        results = verify.run_suites(names, alpha_scale=args.alpha_scale)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status}  {r.name:<{width}}  {r.detail}")
        failures += 0 if r.ok else 1
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return EXIT_OK if failures == 0 else EXIT_ERROR


def build_parser() -> _Parser:
    parser = _Parser(prog="altproj", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="alternate projections from a JSON spec")
    p_run.add_argument("spec", help="experiment spec JSON path")
    p_run.add_argument("--max-iters", type=int, default=None, help="cycle cap override")
    p_run.add_argument("--out", default=".", help="output directory for CSV/JSON")
    p_run.set_defaults(func=cmd_run)

    p_bound = sub.add_parser("bound", help="constants and step bound for a pair")
    p_bound.add_argument("problem", help="problem JSON path (setA, setB, x0)")
    p_bound.set_defaults(func=cmd_bound)

    p_lp = sub.add_parser("lp", help="solve an LP by projections")
    p_lp.add_argument("problem", help="LP JSON path (c, A, b, M)")
    p_lp.add_argument(
        "--strategy", choices=("direct", "shifted"), default="direct", help="solve strategy"
    )
    p_lp.add_argument(
        "--auto-bound",
        action="store_true",
        help="set M to the vertex-oracle optimum minus one (test convenience)",
    )
    p_lp.add_argument("--out", default=None, help="directory for the run trace CSV")
    p_lp.set_defaults(func=cmd_lp)

    p_verify = sub.add_parser("verify", help="run self-check suites")
    p_verify.add_argument("--suite", default=None, help="single suite name (default: all)")
    p_verify.add_argument(
        "--alpha-scale",
        type=float,
        default=1.0,
        help="test hook: scale the angle constant inside bound checks",
    )
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LowerBoundNotStrict as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND_NOT_STRICT
    except NotPolyhedralPair as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_POLYHEDRAL
    except AltprojError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
