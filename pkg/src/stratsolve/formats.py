"""JSON documents for equation systems and programs.

Extended reals are written as numbers or the strings "inf"/"neginf";
matrices are row-major lists of lists.  Parsing errors carry the location of
the offending field (``ValidationError.where``).
"""
from __future__ import annotations

import json
from typing import Any, Dict, List, Tuple

import numpy as np

from . import extreal
from .core import (
    Affine,
    CaseAtInfinity,
    Const,
    EquationSystem,
    LpLeaf,
    Max,
    MinAffine,
    NegInf,
    SdpLeaf,
)
from .linprog import LpOperator
from .relax import Assign, Edge, Guard, Program, QuadraticTemplate
from .sdpsolve import SdpOperator


class ValidationError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where
        self.message = message


def _get(d: Any, key: str, where: str):
    if not isinstance(d, dict):
        raise ValidationError(where, "expected an object")
    if key not in d:
        raise ValidationError(where, f"missing field {key!r}")
    return d[key]


def _ext(token, where: str) -> float:
    try:
        return extreal.parse(token)
    except (TypeError, ValueError) as exc:
        raise ValidationError(where, str(exc)) from None


def _num(token, where: str) -> float:
    v = _ext(token, where)
    if not extreal.is_finite(v):
        raise ValidationError(where, "expected a finite number")
    return v


def _vector(token, where: str) -> np.ndarray:
    if not isinstance(token, list):
        raise ValidationError(where, "expected a list of numbers")
    return np.array([_num(v, f"{where}[{i}]") for i, v in enumerate(token)], dtype=float)


def _matrix(token, where: str, square: bool = False, ncols: int = None) -> np.ndarray:
    if not isinstance(token, list) or not all(isinstance(r, list) for r in token):
        raise ValidationError(where, "expected a list of rows")
    rows = [_vector(r, f"{where}[{i}]") for i, r in enumerate(token)]
    width = ncols if ncols is not None else (len(rows[0]) if rows else 0)
    if any(r.size != width for r in rows):
        raise ValidationError(where, f"rows must all have length {width}")
    M = np.array(rows, dtype=float).reshape(len(rows), width)
    if square and M.shape[0] != M.shape[1]:
        raise ValidationError(where, f"expected a square matrix, got {M.shape[0]}x{M.shape[1]}")
    return M


def _sym(token, where: str, n: int) -> np.ndarray:
    M = _matrix(token, where, square=True)
    if M.shape != (n, n):
        raise ValidationError(where, f"expected a {n}x{n} matrix, got {M.shape[0]}x{M.shape[1]}")
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-12:
        raise ValidationError(where, "matrix is not symmetric")
    return 0.5 * (M + M.T)


def _names(token, where: str) -> List[str]:
    if not isinstance(token, list) or not all(isinstance(v, str) for v in token):
        raise ValidationError(where, "expected a list of names")
    return list(token)


# ---------------------------------------------------------------- equation systems


def _affine(d, where: str) -> Affine:
    weights = d.get("weights", {}) if isinstance(d, dict) else None
    if not isinstance(weights, dict):
        raise ValidationError(where, "weights must be an object {var: weight}")
    ws = {}
    for v, w in weights.items():
        w = _num(w, f"{where}.weights.{v}")
        if w < 0:
            raise ValidationError(f"{where}.weights.{v}", "weights must be >= 0")
        ws[v] = w
    return Affine(ws, _ext(d.get("offset", 0.0), f"{where}.offset"))


def parse_leaf(d, where: str):
    if d == "neginf":
        return NegInf()
    if not isinstance(d, dict) or len(d) != 1:
        raise ValidationError(where, "a child is \"neginf\" or an object with exactly one kind key")
    (kind, body), = d.items()
    w = f"{where}.{kind}"
    if kind == "const":
        return Const(_ext(body, w))
    if kind == "affine":
        return _affine(body, w)
    if kind == "min_affine":
        if not isinstance(body, list) or not body:
            raise ValidationError(w, "expected a non-empty list of affine maps")
        return MinAffine(tuple(_affine(t, f"{w}[{i}]") for i, t in enumerate(body)))
    if kind == "lp":
        c = _vector(_get(body, "c", w), f"{w}.c")
        args = _names(_get(body, "args", w), f"{w}.args")
        A = _matrix(_get(body, "A", w), f"{w}.A", ncols=c.size)
        if A.shape[0] != len(args):
            raise ValidationError(w, f"A has {A.shape[0]} rows but there are {len(args)} args")
        A_fixed = _matrix(body.get("A_fixed", []), f"{w}.A_fixed", ncols=c.size)
        b_fixed = _vector(body.get("b_fixed", []), f"{w}.b_fixed")
        if A_fixed.shape[0] != b_fixed.size:
            raise ValidationError(w, "A_fixed and b_fixed disagree in row count")
        strict = body.get("strict_rows", [])
        nrows = A.shape[0] + A_fixed.shape[0]
        if not isinstance(strict, list) or not all(isinstance(i, int) and 0 <= i < nrows for i in strict):
            raise ValidationError(f"{w}.strict_rows", f"expected row indices in [0, {nrows})")
        return LpLeaf(LpOperator(A, c, A_fixed, b_fixed, frozenset(strict)), tuple(args))
    if kind == "sdp":
        n = _get(body, "dim", w)
        if not isinstance(n, int) or n < 1:
            raise ValidationError(f"{w}.dim", "expected a positive integer")
        args = _names(_get(body, "args", w), f"{w}.args")

        def mats(key, required=True):
            token = _get(body, key, w) if required else body.get(key, [])
            if not isinstance(token, list):
                raise ValidationError(f"{w}.{key}", "expected a list of matrices")
            return [_sym(M, f"{w}.{key}[{i}]", n) for i, M in enumerate(token)]

        A_eq, B, B_fixed = mats("A_eq"), mats("B"), mats("B_fixed", required=False)
        a = _vector(_get(body, "a", w), f"{w}.a")
        b_fixed = _vector(body.get("b_fixed", []), f"{w}.b_fixed")
        if len(A_eq) != a.size:
            raise ValidationError(w, "A_eq and a disagree in length")
        if len(B) != len(args):
            raise ValidationError(w, f"{len(B)} maps in B but {len(args)} args")
        if len(B_fixed) != b_fixed.size:
            raise ValidationError(w, "B_fixed and b_fixed disagree in length")
        C = _sym(_get(body, "C", w), f"{w}.C", n)
        return SdpLeaf(SdpOperator(A_eq, a, B, C, B_fixed, b_fixed), tuple(args))
    if kind == "case_at_inf":
        watch = _get(body, "watch", w)
        if not isinstance(watch, str):
            raise ValidationError(f"{w}.watch", "expected a variable name")
        try:
            return CaseAtInfinity(watch, _num(_get(body, "finite", w), f"{w}.finite"),
                                  _num(_get(body, "infinite", w), f"{w}.infinite"))
        except ValidationError:
            raise
        except ValueError as exc:
            raise ValidationError(w, str(exc)) from None
    raise ValidationError(where, f"unknown child kind {kind!r}")


def parse_system(doc) -> EquationSystem:
    variables = _names(_get(doc, "variables", "$"), "$.variables")
    eqs = _get(doc, "equations", "$")
    if not isinstance(eqs, dict):
        raise ValidationError("$.equations", "expected an object {var: [child, ...]}")
    known = set(variables)
    if len(known) != len(variables):
        raise ValidationError("$.variables", "variables must be pairwise distinct")
    equations = {}
    for x, children in eqs.items():
        where = f"$.equations.{x}"
        if x not in known:
            raise ValidationError(where, f"equation for undeclared variable {x!r}")
        if not isinstance(children, list) or not children:
            raise ValidationError(where, "expected a non-empty list of children")
        leaves = []
        for i, child in enumerate(children):
            leaf = parse_leaf(child, f"{where}[{i}]")
            for v in leaf.variables():
                if v not in known:
                    raise ValidationError(f"{where}[{i}]", f"unknown variable {v!r}")
            leaves.append(leaf)
        equations[x] = Max(tuple(leaves))
    for x in variables:
        if x not in equations:
            raise ValidationError("$.equations", f"no equation for variable {x!r}")
    return EquationSystem(tuple(variables), equations)


def _mat_out(M: np.ndarray) -> list:
    return [[float(v) for v in row] for row in np.asarray(M)]


def _affine_out(a: Affine) -> dict:
    return {"weights": {v: w for v, w in a.weights}, "offset": extreal.dump(a.offset)}


def dump_leaf(leaf):
    if isinstance(leaf, NegInf):
        return "neginf"
    if isinstance(leaf, Const):
        return {"const": extreal.dump(leaf.value)}
    if isinstance(leaf, Affine):
        return {"affine": _affine_out(leaf)}
    if isinstance(leaf, MinAffine):
        return {"min_affine": [_affine_out(t) for t in leaf.terms]}
    if isinstance(leaf, LpLeaf):
        op = leaf.op
        body = {"A": _mat_out(op.A), "c": [float(v) for v in op.c], "args": list(leaf.args)}
        if op.A_fixed.shape[0]:
            body["A_fixed"] = _mat_out(op.A_fixed)
            body["b_fixed"] = [float(v) for v in op.b_fixed]
        if op.strict:
            body["strict_rows"] = sorted(op.strict)
        return {"lp": body}
    if isinstance(leaf, SdpLeaf):
        op = leaf.op
        body = {
            "dim": op.dim,
            "A_eq": [_mat_out(M) for M in op.A_eq],
            "a": [float(v) for v in op.a],
            "B": [_mat_out(M) for M in op.B],
            "C": _mat_out(op.C),
            "args": list(leaf.args),
        }
        if op.B_fixed:
            body["B_fixed"] = [_mat_out(M) for M in op.B_fixed]
            body["b_fixed"] = [float(v) for v in op.b_fixed]
        return {"sdp": body}
    if isinstance(leaf, CaseAtInfinity):
        return {"case_at_inf": {"watch": leaf.watch, "finite": leaf.finite, "infinite": leaf.infinite}}
    raise TypeError(f"unknown leaf type {type(leaf).__name__}")


def dump_system(E: EquationSystem) -> dict:
    return {
        "variables": list(E.variables),
        "equations": {x: [dump_leaf(l) for l in E.equations[x].children] for x in E.variables},
    }


# ---------------------------------------------------------------- programs


def _stmt(d, where: str, n: int):
    if not isinstance(d, dict) or len(d) != 1:
        raise ValidationError(where, "expected {\"assign\": ...} or {\"guard\": ...}")
    (kind, body), = d.items()
    w = f"{where}.{kind}"
    b = _vector(_get(body, "b", w), f"{w}.b")
    if b.size != n:
        raise ValidationError(f"{w}.b", f"expected length {n}, got {b.size}")
    if kind == "assign":
        A = _matrix(_get(body, "A", w), f"{w}.A", square=True)
        if A.shape != (n, n):
            raise ValidationError(f"{w}.A", f"expected a {n}x{n} matrix")
        return Assign(A, b)
    if kind == "guard":
        return Guard(_sym(_get(body, "A", w), f"{w}.A", n), b, _num(_get(body, "c", w), f"{w}.c"))
    raise ValidationError(where, f"unknown statement kind {kind!r}")


def parse_program(doc) -> Tuple[Program, List[QuadraticTemplate]]:
    n = _get(doc, "dim", "$")
    if not isinstance(n, int) or n < 1:
        raise ValidationError("$.dim", "expected a positive integer")
    nodes = _names(_get(doc, "nodes", "$"), "$.nodes")
    start = _get(doc, "start", "$")
    edges_doc = doc.get("edges", [])
    if not isinstance(edges_doc, list):
        raise ValidationError("$.edges", "expected a list")
    edges = []
    for i, e in enumerate(edges_doc):
        w = f"$.edges[{i}]"
        src, dst = _get(e, "from", w), _get(e, "to", w)
        for key, v in (("from", src), ("to", dst)):
            if v not in nodes:
                raise ValidationError(f"{w}.{key}", f"unknown node {v!r}")
        edges.append(Edge(src, _stmt(_get(e, "stmt", w), f"{w}.stmt", n), dst))
    tdoc = _get(doc, "templates", "$")
    if not isinstance(tdoc, list) or not tdoc:
        raise ValidationError("$.templates", "expected a non-empty list")
    templates = []
    for i, t in enumerate(tdoc):
        w = f"$.templates[{i}]"
        b = _vector(_get(t, "b", w), f"{w}.b")
        if b.size != n:
            raise ValidationError(f"{w}.b", f"expected length {n}")
        try:
            templates.append(QuadraticTemplate(_sym(_get(t, "A", w), f"{w}.A", n), b))
        except ValidationError:
            raise
        except ValueError as exc:
            raise ValidationError(w, str(exc)) from None
    init = _get(doc, "init_bounds", "$")
    init_bounds = init_box = None
    if isinstance(init, dict):
        box = _matrix(_get(init, "box", "$.init_bounds"), "$.init_bounds.box", ncols=2)
        if box.shape[0] != n or np.any(box[:, 0] > box[:, 1]):
            raise ValidationError("$.init_bounds.box", f"expected {n} intervals [lo, hi] with lo <= hi")
        init_box = [(float(lo), float(hi)) for lo, hi in box]
    elif isinstance(init, list):
        init_bounds = [_ext(v, f"$.init_bounds[{i}]") for i, v in enumerate(init)]
        if len(init_bounds) != len(templates):
            raise ValidationError("$.init_bounds", f"{len(init_bounds)} bounds for {len(templates)} templates")
    else:
        raise ValidationError("$.init_bounds", "expected a list of bounds or {\"box\": ...}")
    try:
        G = Program(n, nodes, start, edges, init_bounds, init_box)
    except ValueError as exc:
        raise ValidationError("$", str(exc)) from None
    return G, templates


def dump_program(G: Program, templates: List[QuadraticTemplate]) -> dict:
    def stmt(s):
        if isinstance(s, Assign):
            return {"assign": {"A": _mat_out(s.A), "b": [float(v) for v in s.b]}}
        return {"guard": {"A": _mat_out(s.A), "b": [float(v) for v in s.b], "c": s.c}}

    if G.init_box is not None:
        init: Any = {"box": [[lo, hi] for lo, hi in G.init_box]}
    else:
        init = [extreal.dump(v) for v in G.init_bounds]
    return {
        "dim": G.dim,
        "nodes": list(G.nodes),
        "start": G.start,
        "edges": [{"from": e.src, "to": e.dst, "stmt": stmt(e.stmt)} for e in G.edges],
        "templates": [{"A": _mat_out(p.A), "b": [float(v) for v in p.b]} for p in templates],
        "init_bounds": init,
    }


def load_json(path: str):
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None


def valuation_doc(values: Dict[str, float]) -> Dict[str, Any]:
    return {x: extreal.dump(v) for x, v in values.items()}
