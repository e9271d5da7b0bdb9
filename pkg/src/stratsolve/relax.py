"""Quadratic-template analysis of affine programs via Shor relaxation.

A program is a control-flow graph whose edges carry affine assignments
``x := A x + b`` or quadratic guards ``x^T A x + 2 b^T x <= c``.  Templates
are quadratic forms ``p(x) = x^T A_p x + 2 b_p^T x``; the abstract value at
a node bounds every template from above.  Each (edge, template) pair becomes
an SDP operator over the lifted matrix ``X = (1, x^T)^T (1, x^T)`` relaxed to
``X PSD, X_11 = 1``, and the bounds are the least solution of the resulting
max-of-SDP equation system.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import extreal
from .core import Const, EquationSystem, Max, NegInf, SdpLeaf
from .evaluate import SolveResult, solve_least, TOL_FIX
from .sdpsolve import SdpOperator, symmetrize


class NonConvexTemplate(ValueError):
    """Box abstraction requested for a template that is not convex."""


@dataclass(frozen=True, eq=False)
class Assign:
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape != (b.size, b.size):
            raise ValueError(f"assignment matrix {A.shape} does not match vector of length {b.size}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.b.size


@dataclass(frozen=True, eq=False)
class Guard:
    A: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        A = symmetrize(self.A)
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape != (b.size, b.size):
            raise ValueError(f"guard matrix {A.shape} does not match vector of length {b.size}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.b.size


Statement = Union[Assign, Guard]


@dataclass(frozen=True, eq=False)
class QuadraticTemplate:
    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = symmetrize(self.A)
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape != (b.size, b.size):
            raise ValueError(f"template matrix {A.shape} does not match vector of length {b.size}")
        if not (A.any() or b.any()):
            raise ValueError("the zero template carries no information")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.b.size

    def lifted(self) -> np.ndarray:
        """``[[0, b^T], [b, A]]``, so that ``lifted • X(x) = p(x)``."""
        return _lift(0.0, self.b, self.A)

    @classmethod
    def linear(cls, q) -> "QuadraticTemplate":
        """The template ``q^T x``."""
        q = np.asarray(q, dtype=float).ravel()
        return cls(np.zeros((q.size, q.size)), 0.5 * q)


@dataclass
class Edge:
    src: str
    stmt: Statement
    dst: str


@dataclass
class Program:
    dim: int
    nodes: List[str]
    start: str
    edges: List[Edge] = field(default_factory=list)
    # either explicit template bounds at the start node or a box of initial states
    init_bounds: Optional[List[float]] = None
    init_box: Optional[List[Tuple[float, float]]] = None

    def __post_init__(self):
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("node names must be distinct")
        if self.start not in self.nodes:
            raise ValueError(f"start node {self.start!r} is not a node")
        for e in self.edges:
            for v in (e.src, e.dst):
                if v not in self.nodes:
                    raise ValueError(f"edge endpoint {v!r} is not a node")
            if e.stmt.dim != self.dim:
                raise ValueError(f"statement on edge {e.src}->{e.dst} has dimension {e.stmt.dim}, expected {self.dim}")
        if (self.init_bounds is None) == (self.init_box is None):
            raise ValueError("give exactly one of init_bounds and init_box")
        if self.init_box is not None and len(self.init_box) != self.dim:
            raise ValueError("init_box needs one interval per program variable")


# ---------------------------------------------------------------- concrete semantics


def concrete_step(s: Statement, x) -> Optional[np.ndarray]:
    x = np.asarray(x, dtype=float)
    if isinstance(s, Assign):
        return s.A @ x + s.b
    if x @ s.A @ x + 2.0 * s.b @ x <= s.c:
        return x
    return None


def template_value(p: QuadraticTemplate, x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x @ p.A @ x + 2.0 * p.b @ x)


# ---------------------------------------------------------------- relaxation


def _lift(c: float, b: np.ndarray, A: np.ndarray) -> np.ndarray:
    n = b.size
    M = np.empty((n + 1, n + 1))
    M[0, 0] = c
    M[0, 1:] = b
    M[1:, 0] = b
    M[1:, 1:] = A
    return M


def _e11(n: int) -> np.ndarray:
    E = np.zeros((n + 1, n + 1))
    E[0, 0] = 1.0
    return E


def assign_objective(s: Assign, p: QuadraticTemplate) -> np.ndarray:
    """Lifted matrix of ``x -> p(A x + b)``."""
    A, b = s.A, s.b
    Ap = A.T @ p.A @ A
    bp = A.T @ p.A @ b + A.T @ p.b
    cp = b @ p.A @ b + 2.0 * p.b @ b
    M = _lift(cp, bp, Ap)
    return 0.5 * (M + M.T)


def guard_matrix(s: Guard) -> np.ndarray:
    return _lift(-s.c, s.b, s.A)


def _check_dims(s: Statement, templates: Sequence[QuadraticTemplate]) -> None:
    for p in templates:
        if p.dim != s.dim:
            raise ValueError(f"template of dimension {p.dim} used with a statement of dimension {s.dim}")


def relax_assign(s: Assign, templates: Sequence[QuadraticTemplate]) -> List[SdpOperator]:
    """One SDP operator per template, each taking the bounds of all templates."""
    _check_dims(s, templates)
    n = s.dim
    B = [p.lifted() for p in templates]
    return [SdpOperator(A_eq=[_e11(n)], a=[1.0], B=B, C=assign_objective(s, p)) for p in templates]


def relax_guard(s: Guard, templates: Sequence[QuadraticTemplate]) -> List[SdpOperator]:
    _check_dims(s, templates)
    n = s.dim
    B = [p.lifted() for p in templates]
    G = guard_matrix(s)
    return [
        SdpOperator(A_eq=[_e11(n)], a=[1.0], B=B, C=p.lifted(), B_fixed=[G], b_fixed=[0.0])
        for p in templates
    ]


def relax_statement(s: Statement, templates: Sequence[QuadraticTemplate]) -> List[SdpOperator]:
    if isinstance(s, Assign):
        return relax_assign(s, templates)
    return relax_guard(s, templates)


def alpha_box(box: Sequence[Tuple[float, float]], p: QuadraticTemplate, tol: float = 1e-12) -> float:
    """sup of a convex template over a box (attained at a vertex)."""
    lo = np.array([float(a) for a, _ in box])
    hi = np.array([float(b) for _, b in box])
    if lo.size != p.dim:
        raise ValueError(f"box of dimension {lo.size} for a template of dimension {p.dim}")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))) or np.any(lo > hi):
        raise ValueError("box bounds must be finite with lo <= hi")
    if np.linalg.eigvalsh(p.A)[0] < -tol:
        raise NonConvexTemplate("template is not convex; supply init_bounds explicitly")
    return max(template_value(p, v) for v in itertools.product(*zip(lo, hi)))


# ---------------------------------------------------------------- equations


def var_name(node: str, i: int) -> str:
    return f"x_{node}_p{i + 1}"


def initial_bounds(G: Program, templates: Sequence[QuadraticTemplate]) -> List[float]:
    if G.init_bounds is not None:
        if len(G.init_bounds) != len(templates):
            raise ValueError(f"{len(G.init_bounds)} initial bounds for {len(templates)} templates")
        return [extreal.check(v) for v in G.init_bounds]
    return [alpha_box(G.init_box, p) for p in templates]


def build_equations(G: Program, templates: Sequence[QuadraticTemplate]) -> EquationSystem:
    m = len(templates)
    if m == 0:
        raise ValueError("need at least one template")
    init = initial_bounds(G, templates)
    children: Dict[str, list] = {}
    for v in G.nodes:
        for i in range(m):
            children[var_name(v, i)] = [NegInf()]
    for i in range(m):
        children[var_name(G.start, i)].append(Const(init[i]))
    for e in G.edges:
        args = tuple(var_name(e.src, j) for j in range(m))
        for i, op in enumerate(relax_statement(e.stmt, templates)):
            children[var_name(e.dst, i)].append(SdpLeaf(op, args))
    variables = tuple(var_name(v, i) for v in G.nodes for i in range(m))
    return EquationSystem(variables, {x: Max(tuple(children[x])) for x in variables})


@dataclass
class AnalysisResult:
    bounds: Dict[str, List[float]]
    steps: int
    strategies: int
    residual: float
    solve: SolveResult


def analyze(
    G: Program,
    templates: Sequence[QuadraticTemplate],
    tol_fix: float = TOL_FIX,
    trace: bool = False,
    algorithm: str = "cmorcave",
) -> AnalysisResult:
    E = build_equations(G, templates)
    res = solve_least(E, algorithm=algorithm, tol_fix=tol_fix, trace=trace)
    bounds = {v: [res.values[var_name(v, i)] for i in range(len(templates))] for v in G.nodes}
    return AnalysisResult(bounds, res.steps, E.strategy_count(), res.residual, res)


def harmonic_oscillator() -> Tuple[Program, List[QuadraticTemplate]]:
    """``while (true) x := A x`` from the unit box, with five templates."""
    A = np.array([[1.0, 0.01], [-0.01, 0.99]])
    G = Program(
        dim=2,
        nodes=["st"],
        start="st",
        edges=[Edge("st", Assign(A, np.zeros(2)), "st")],
        init_box=[(0.0, 1.0), (0.0, 1.0)],
    )
    templates = [
        QuadraticTemplate.linear([-1.0, 0.0]),
        QuadraticTemplate.linear([1.0, 0.0]),
        QuadraticTemplate.linear([0.0, -1.0]),
        QuadraticTemplate.linear([0.0, 1.0]),
        QuadraticTemplate(np.array([[2.0, 1.0], [1.0, 3.0]]), np.zeros(2)),
    ]
    return G, templates
