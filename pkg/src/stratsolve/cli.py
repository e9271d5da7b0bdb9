"""Command line: ``stratsolve solve FILE`` and ``stratsolve analyze FILE``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure of a subsolver.
Results go to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from typing import List, Optional

from . import extreal
from .core import standard_form
from .evaluate import ALGORITHMS, TOL_FIX, EvaluationError, SolveResult, StepBudgetExceeded, UnsupportedLeaf, solve_least
from .formats import ValidationError, dump_system, load_json, parse_program, parse_system, valuation_doc
from .relax import NonConvexTemplate, analyze, build_equations
from .sdpsolve import NumericalFailure

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3


def _steps(k: int) -> str:
    return "step" if k == 1 else "steps"


def _trace_doc(res: SolveResult) -> list:
    return [{"strategy": e.strategy, "values": valuation_doc(e.values)} for e in res.trace]


def _print_trace(res: SolveResult) -> None:
    for i, e in enumerate(res.trace):
        choice = " ".join(f"{x}:{k}" for x, k in e.strategy.items())
        vals = " ".join(f"{x}={extreal.fmt(v)}" for x, v in e.values.items())
        print(f"  sigma{i} [{choice}]  {vals}")


def _result_doc(res: SolveResult, elapsed: float) -> dict:
    doc = {
        "values": valuation_doc(res.values),
        "steps": res.steps,
        "algorithm": res.algorithm,
        "residual": extreal.dump(res.residual),
        "step_budget": res.budget,
        "strategy": res.strategy,
        "seconds": elapsed,
    }
    if res.trace:
        doc["trace"] = _trace_doc(res)
    return doc


def cmd_solve(args) -> int:
    E = parse_system(load_json(args.file))
    if not E.is_standard_form():
        # -inf v e = e, so the least solution is unchanged
        print("note: prepending -inf to right-hand sides to reach standard form", file=sys.stderr)
        E = standard_form(E)
    t0 = time.perf_counter()
    res = solve_least(E, algorithm=args.algorithm, tol_fix=args.tol, trace=args.trace)
    elapsed = time.perf_counter() - t0
    if args.json:
        json.dump(_result_doc(res, elapsed), sys.stdout, indent=2)
        print()
        return EXIT_OK
    width = max(len(x) for x in E.variables)
    for x in E.variables:
        print(f"{x:<{width}} = {extreal.fmt(res.values[x])}")
    print(f"steps = {res.steps} improvement {_steps(res.steps)} ({res.algorithm}, residual {res.residual:.2e}, {elapsed:.3f} s)")
    if args.trace:
        _print_trace(res)
    return EXIT_OK


def cmd_analyze(args) -> int:
    G, templates = parse_program(load_json(args.file))
    if args.emit_eqs:
        with open(args.emit_eqs, "w") as fh:
            json.dump(dump_system(build_equations(G, templates)), fh, indent=1)
    t0 = time.perf_counter()
    res = analyze(G, templates, tol_fix=args.tol, trace=args.trace)
    elapsed = time.perf_counter() - t0
    if args.json:
        doc = _result_doc(res.solve, elapsed)
        doc["bounds"] = {v: [extreal.dump(b) for b in bs] for v, bs in res.bounds.items()}
        doc["strategies"] = res.strategies
        json.dump(doc, sys.stdout, indent=2)
        print()
        return EXIT_OK
    m = len(templates)
    width = max(len(v) for v in G.nodes)
    print(f"{'node':<{width}}  " + "  ".join(f"{'p' + str(i + 1):>12}" for i in range(m)))
    for v in G.nodes:
        print(f"{v:<{width}}  " + "  ".join(f"{extreal.fmt(b):>12}" for b in res.bounds[v]))
    print(f"{res.steps} improvement {_steps(res.steps)} ({res.strategies} strategies, residual {res.residual:.2e}, {elapsed:.3f} s)")
    if args.trace:
        _print_trace(res.solve)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stratsolve", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="least solution of an equation system (JSON)")
    p.add_argument("file")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    p.add_argument("--tol", type=float, default=TOL_FIX, help="fixpoint residual tolerance")
    p.add_argument("--trace", action="store_true", help="report every strategy and valuation")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("analyze", help="template bounds for a program (JSON)")
    p.add_argument("file")
    p.add_argument("--emit-eqs", metavar="OUT", help="also write the generated equation system")
    p.add_argument("--tol", type=float, default=TOL_FIX, help="fixpoint residual tolerance")
    p.add_argument("--trace", action="store_true", help="report every strategy and valuation")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValidationError, NonConvexTemplate, UnsupportedLeaf) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalFailure, EvaluationError, StepBudgetExceeded) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
