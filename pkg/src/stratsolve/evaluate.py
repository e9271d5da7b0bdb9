"""Evaluation of strategies and the strategy-improvement loop.

A strategy ``sigma`` picks one leaf per equation, giving a conjunctive
system ``E(sigma)``.  The evaluators below compute the least solution of
``E(sigma)`` above a pre-solution ``rho``.  All of them work through the
constraint system ``C(E)``: every equation ``x = f(x_1..x_k)`` becomes
``x <= f's objective`` together with ``f``'s feasibility constraints in which
the parameters are replaced by the argument variables.  Maximizing a single
variable over ``C(E)`` yields the greatest finite pre-solution in that
coordinate.

Infinite values are split off first (``suppresol_partition``): variables
whose right-hand side is -inf or +inf under ``rho`` are fixed to that value
and substituted into the remaining equations.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence

import numpy as np

from . import extreal, linprog, sdpsolve
from .core import (
    EPS_IMPROVE,
    Affine,
    CaseAtInfinity,
    Const,
    EquationSystem,
    LpLeaf,
    Max,
    MinAffine,
    NegInf,
    SdpLeaf,
    Strategy,
    Valuation,
    exceeds,
    apply_strategy,
    bottom,
    improve_strategy,
    initial_strategy,
    kleene_step,
    residual,
)
from .extreal import NEG_INF, POS_INF
from .sdpsolve import ConicProblem

log = logging.getLogger(__name__)

TOL_FIX = 1e-6
# Conic solves near degenerate parameters (e.g. sqrt at 0) are only accurate
# to a few 1e-6; increases smaller than this are treated as noise.
EPS_SDP = 1e-5
# a maximization may undershoot the starting value by solver error only
TOL_UNDERSHOOT = 1e-4

ALGORITHMS = ("auto", "maxatt", "gen", "cmorcave")


class UnsupportedLeaf(ValueError):
    """A leaf without a constraint form appeared in an active equation."""


class StepBudgetExceeded(RuntimeError):
    """More improvement steps than |X| * |Sigma|: an internal invariant broke."""


class EvaluationError(RuntimeError):
    """A maximization returned less than the pre-solution it started from."""


# ---------------------------------------------------------------- C(E)


@dataclass
class ConstraintSystem:
    problem: ConicProblem
    index: Dict[str, int]
    infeasible: bool = False

    @property
    def has_blocks(self) -> bool:
        return bool(self.problem.block_dims)

    def maximize(self, x: str) -> float:
        """sup of ``x`` over the constraint system, in the extended reals."""
        if self.infeasible:
            return NEG_INF
        i = self.index[x]
        if not self.has_blocks:
            return self._maximize_lp(i)
        P = self.problem.copy_with_objective({i: 1.0})
        return sdpsolve.solve_conic_robust(P).to_extreal()

    def _maximize_lp(self, i: int) -> float:
        P = self.problem
        n = P.nscalars
        ineq = [r for r in P.rows if r.rel == "<="]
        eq = [r for r in P.rows if r.rel == "="]

        def dense(rows):
            M = np.zeros((len(rows), n))
            for k, r in enumerate(rows):
                for j, a in r.scalars.items():
                    M[k, j] += a
            return M, np.array([r.rhs for r in rows], dtype=float)

        A, b = dense(ineq)
        A_eq, b_eq = dense(eq)
        c = np.zeros(n)
        c[i] = 1.0
        return linprog.solve_lp(A, b, c, A_eq=A_eq, b_eq=b_eq).to_extreal()


def build_constraint_system(
    E: EquationSystem,
    active: Sequence[str],
    fixed: Optional[Mapping[str, float]] = None,
    allow_case: bool = False,
) -> ConstraintSystem:
    """``C(E)`` restricted to the ``active`` variables.

    Every other variable referenced by an active equation must appear in
    ``fixed`` with the value substituted for it.  Strict LP rows are relaxed
    to non-strict ones.  ``CaseAtInfinity`` leaves are only accepted with
    ``allow_case``; they then become the constant selected by whether the
    watched variable was substituted by +inf.
    """
    fixed = dict(fixed or {})
    P = ConicProblem()
    index = {x: P.add_scalar() for x in active}
    cs = ConstraintSystem(P, index)

    def value_of(v: str):
        if v in index:
            return None
        if v not in fixed:
            raise KeyError(f"variable {v!r} is neither active nor substituted")
        return fixed[v]

    def upper(x: str, c: float) -> None:
        if c == POS_INF:
            return
        if c == NEG_INF:
            cs.infeasible = True
            return
        P.add_row({index[x]: 1.0}, rel="<=", rhs=c)

    def affine(x: str, leaf: Affine) -> None:
        # x - sum_{active} w v <= offset + sum_{fixed} w v
        coeffs: Dict[int, float] = {index[x]: 1.0}
        const = leaf.offset
        for v, w in leaf.weights:
            val = value_of(v)
            if val is None:
                coeffs[index[v]] = coeffs.get(index[v], 0.0) - w
            else:
                const = extreal.add(const, extreal.scale(w, val))
        if const == POS_INF:
            return
        if const == NEG_INF:
            cs.infeasible = True
            return
        P.add_row(coeffs, rel="<=", rhs=const)

    def param_row(scalars: dict, blocks: dict, arg: str) -> None:
        # <row> <= arg
        val = value_of(arg)
        if val is None:
            scalars = dict(scalars)
            scalars[index[arg]] = scalars.get(index[arg], 0.0) - 1.0
            P.add_row(scalars, blocks, rel="<=", rhs=0.0)
        elif val == NEG_INF:
            cs.infeasible = True
        elif val != POS_INF:
            P.add_row(scalars, blocks, rel="<=", rhs=val)

    for x in active:
        leaf = E.leaf(x)
        if isinstance(leaf, NegInf):
            cs.infeasible = True
        elif isinstance(leaf, Const):
            upper(x, leaf.value)
        elif isinstance(leaf, Affine):
            affine(x, leaf)
        elif isinstance(leaf, MinAffine):
            for term in leaf.terms:
                affine(x, term)
        elif isinstance(leaf, LpLeaf):
            op = leaf.op
            ys = [P.add_scalar() for _ in range(op.nvars)]
            obj = {index[x]: 1.0}
            for y, cj in zip(ys, op.c):
                if cj:
                    obj[y] = obj.get(y, 0.0) - cj
            P.add_row(obj, rel="<=", rhs=0.0)
            for row, arg in zip(op.A, leaf.args):
                param_row({y: a for y, a in zip(ys, row) if a}, {}, arg)
            for row, rhs in zip(op.A_fixed, op.b_fixed):
                P.add_row({y: a for y, a in zip(ys, row) if a}, rel="<=", rhs=rhs)
        elif isinstance(leaf, SdpLeaf):
            op = leaf.op
            j = P.add_block(op.dim)
            P.add_row({index[x]: 1.0}, {j: -op.C}, rel="<=", rhs=0.0)
            for M, a in zip(op.A_eq, op.a):
                P.add_row({}, {j: M}, rel="=", rhs=a)
            for M, arg in zip(op.B, leaf.args):
                param_row({}, {j: M}, arg)
            for M, rhs in zip(op.B_fixed, op.b_fixed):
                P.add_row({}, {j: M}, rel="<=", rhs=rhs)
        elif isinstance(leaf, CaseAtInfinity):
            if not allow_case:
                raise UnsupportedLeaf(f"equation for {x!r}: case-at-infinity leaf has no constraint form")
            val = value_of(leaf.watch)
            upper(x, leaf.infinite if val == POS_INF else leaf.finite)
        else:
            raise UnsupportedLeaf(f"equation for {x!r}: unknown leaf {type(leaf).__name__}")
    return cs


# ---------------------------------------------------------------- infinities


@dataclass(frozen=True)
class InfinityPartition:
    neg: FrozenSet[str]
    pos: FrozenSet[str]
    rest: tuple

    def substitution(self) -> Dict[str, float]:
        sub = {x: NEG_INF for x in self.neg}
        sub.update({x: POS_INF for x in self.pos})
        return sub


def suppresol_partition(E: EquationSystem, rho: Mapping[str, float]) -> InfinityPartition:
    values = kleene_step(E, rho)
    neg = frozenset(x for x in E.variables if values[x] == NEG_INF)
    pos = frozenset(x for x in E.variables if values[x] == POS_INF)
    rest = tuple(x for x in E.variables if x not in neg and x not in pos)
    return InfinityPartition(neg, pos, rest)


def _settle(x: str, value: float, start: float) -> float:
    """Clip solver noise below the starting value; complain about real drops."""
    if value >= start:
        return value
    if math.isfinite(start) and value >= start - TOL_UNDERSHOOT:
        return start
    raise EvaluationError(f"maximizing {x!r} gave {value} below its pre-solution value {start}")


def _maximize_all(cs: ConstraintSystem, xs: Sequence[str], start: Mapping[str, float]) -> Valuation:
    # the maximizations are independent of each other
    return {x: _settle(x, cs.maximize(x), start[x]) for x in xs}


def suppresol(
    E: EquationSystem,
    rho: Mapping[str, float],
    allow_case: bool = True,
    frozen: Optional[Mapping[str, float]] = None,
) -> Valuation:
    """One round: fix the infinite variables, maximize the rest over C(E'_rho).

    ``frozen`` variables behave as if their equation were ``x = value``; they
    are substituted as constants, which is equivalent because every other
    constraint bounds them from below only.
    """
    frozen = dict(frozen or {})
    if frozen:
        rho = {**rho, **frozen}
    part = suppresol_partition(E, rho)
    new = part.substitution()
    for x, v in frozen.items():
        new.pop(x, None)
    fixed = {**new, **frozen}
    active = [x for x in part.rest if x not in frozen]
    if active:
        cs = build_constraint_system(E, active, fixed, allow_case=allow_case)
        new.update(_maximize_all(cs, active, rho))
    new.update(frozen)
    return {x: new[x] for x in E.variables}


def suppresol_iterate(
    E: EquationSystem, rho: Mapping[str, float], max_rounds: Optional[int] = None
) -> Valuation:
    """Iterate :func:`suppresol` until nothing changes (at most |X| rounds)."""
    rounds = len(E) if max_rounds is None else max_rounds
    cur = dict(rho)
    for _ in range(max(rounds, 1)):
        nxt = suppresol(E, cur)
        if nxt == cur:
            break
        cur = nxt
    return cur


# ---------------------------------------------------------------- evaluators


def eval_for_max_att(E: EquationSystem, rho0: Mapping[str, float], eps: float = EPS_IMPROVE) -> Valuation:
    """For systems whose leaves attain their optima (LP, affine, constants)."""
    return suppresol(E, rho0, allow_case=False)


def freeze(E: EquationSystem, values: Mapping[str, float]) -> EquationSystem:
    """Replace the equations of the given variables by ``x = value``."""
    eqs = dict(E.equations)
    for x, v in values.items():
        eqs[x] = Max((Const(v),))
    return EquationSystem(E.variables, eqs)


@dataclass
class GenStats:
    rounds: int = 0
    frozen_sets: List[FrozenSet[str]] = field(default_factory=list)


def _gen_inner(E, rest, sub, rho0, eps, stats: GenStats) -> Valuation:
    rho = {**rho0, **sub}
    frozen_prev = None
    for _ in range(len(rest) + 1):
        values = kleene_step(E, rho)
        frozen = frozenset(x for x in rest if not exceeds(values[x], rho0[x], eps))
        stats.rounds += 1
        stats.frozen_sets.append(frozen)
        if frozen == frozen_prev:
            break
        # rho only grows, so equations can only leave the frozen set
        if frozen_prev is not None and not frozen <= frozen_prev:
            raise EvaluationError("frozen set gained members")
        values = {x: rho0[x] for x in frozen}
        active = [x for x in rest if x not in frozen]
        if active:
            cs = build_constraint_system(E, active, {**sub, **values}, allow_case=True)
            values.update(_maximize_all(cs, active, rho0))
        rho = {**rho, **values}
        frozen_prev = frozen
    return {x: rho[x] for x in rest}


def eval_for_gen(
    E: EquationSystem,
    rho0: Mapping[str, float],
    eps: float = EPS_IMPROVE,
    stats: Optional[GenStats] = None,
) -> Valuation:
    """For general leaves: freeze equations that cannot exceed rho0, maximize, repeat.

    Every pass first splits off infinite right-hand sides; another pass
    (at most |X| in total) follows only if the split changed.
    """
    stats = stats if stats is not None else GenStats()
    cur = dict(rho0)
    part = suppresol_partition(E, cur)
    for _ in range(max(len(E), 1)):
        new = part.substitution()
        if part.rest:
            new.update(_gen_inner(E, part.rest, new, cur, eps, stats))
        cur = {x: new[x] for x in E.variables}
        # the finite part is settled; only new infinities call for another pass
        nxt = suppresol_partition(E, cur)
        if nxt == part:
            break
        part = nxt
    return cur


def increasing_variables(E: EquationSystem, rho: Mapping[str, float], eps: float) -> FrozenSet[str]:
    """Variables that |X| Kleene steps from rho raise by more than eps.

    Values within eps of rho are snapped back to rho before the next step,
    so solver noise is not amplified by the iteration.
    """
    cur = dict(rho)
    for _ in range(len(E)):
        nxt = kleene_step(E, cur)
        cur = {x: max(cur[x], nxt[x]) if exceeds(nxt[x], rho[x], eps) else cur[x] for x in E.variables}
    return frozenset(x for x in E.variables if exceeds(cur[x], rho[x], eps))


def eval_for_cmorcave(E: EquationSystem, rho: Mapping[str, float], eps: float = EPS_IMPROVE) -> Valuation:
    """For upward chain-continuous leaves: only the increasing variables move."""
    up = increasing_variables(E, rho, eps)
    if not up:
        return dict(rho)
    return suppresol(E, rho, allow_case=False, frozen={x: rho[x] for x in E.variables if x not in up})


EVALUATORS: Dict[str, Callable] = {
    "maxatt": eval_for_max_att,
    "gen": eval_for_gen,
    "cmorcave": eval_for_cmorcave,
}


def select_algorithm(E: EquationSystem) -> str:
    leaves = list(E.leaves())
    if any(isinstance(l, CaseAtInfinity) for l in leaves):
        return "gen"
    if any(isinstance(l, SdpLeaf) or (isinstance(l, LpLeaf) and l.strict) for l in leaves):
        return "cmorcave"
    return "maxatt"


# ---------------------------------------------------------------- outer loop


@dataclass
class TraceEntry:
    strategy: Strategy
    values: Valuation


@dataclass
class SolveResult:
    values: Valuation
    strategy: Strategy
    steps: int
    algorithm: str
    residual: float
    budget: int
    trace: List[TraceEntry] = field(default_factory=list)


def step_budget(E: EquationSystem) -> int:
    return len(E) * E.strategy_count()


def solve_least(
    E: EquationSystem,
    algorithm: str = "auto",
    tol_fix: float = TOL_FIX,
    eps_improve: Optional[float] = None,
    trace: bool = False,
) -> SolveResult:
    """Least solution of a standard-form system by strategy improvement.

    Starts from the all -inf strategy and valuation, improves the strategy
    and evaluates it until the valuation solves E within ``tol_fix``, or no
    child improves by more than ``eps_improve`` any more.  ``eps_improve``
    defaults to 1e-9, or to the conic noise floor if E has SDP leaves.
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")
    if not E.is_standard_form():
        raise ValueError("system is not in standard form (every right-hand side must start with -inf)")
    if algorithm == "auto":
        algorithm = select_algorithm(E)
    evaluator = EVALUATORS[algorithm]
    if eps_improve is None:
        eps_improve = EPS_SDP if E.has_sdp() else EPS_IMPROVE
    budget = step_budget(E)

    sigma = initial_strategy(E)
    rho = bottom(E)
    entries = [TraceEntry(dict(sigma), dict(rho))] if trace else []
    steps = 0
    while residual(E, rho) > tol_fix:
        new_sigma = improve_strategy(E, sigma, rho, eps_improve)
        if new_sigma == sigma:
            # every remaining violation is below the improvement threshold
            break
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(f"{steps} improvement steps exceed the bound |X|*|Sigma| = {budget}")
        sigma = new_sigma
        rho = evaluator(apply_strategy(E, sigma), rho, eps_improve)
        log.debug("step %d: strategy %s values %s", steps, sigma, rho)
        if trace:
            entries.append(TraceEntry(dict(sigma), dict(rho)))
    return SolveResult(rho, sigma, steps, algorithm, residual(E, rho), budget, entries)
