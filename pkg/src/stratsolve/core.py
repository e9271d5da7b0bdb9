"""Equation systems over the extended reals, strategies and Kleene steps.

A system maps every variable to a maximum ``e_1 v ... v e_k`` of leaves.
Leaves are monotone, order-concave operators: constants, monotone affine
maps, minima of those, and LP/SDP operators applied to variables.
``CaseAtInfinity`` is monotone but not upward chain-continuous; it exists for
tests of the infinity handling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from . import extreal, linprog, sdpsolve
from .extreal import NEG_INF, POS_INF

EPS_IMPROVE = 1e-9

Valuation = Dict[str, float]
Strategy = Dict[str, int]


# ---------------------------------------------------------------- leaves


@dataclass(frozen=True)
class NegInf:
    def variables(self) -> Tuple[str, ...]:
        return ()


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", extreal.check(self.value))

    def variables(self) -> Tuple[str, ...]:
        return ()


@dataclass(frozen=True)
class Affine:
    """``sum_i w_i * x_i + offset`` with ``w_i >= 0``."""

    weights: Tuple[Tuple[str, float], ...] = ()
    offset: float = 0.0

    def __post_init__(self):
        weights = self.weights.items() if isinstance(self.weights, Mapping) else self.weights
        merged: Dict[str, float] = {}
        for var, w in weights:
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"affine weight for {var!r} must be finite and >= 0, got {w}")
            merged[var] = merged.get(var, 0.0) + w
        object.__setattr__(self, "weights", tuple(sorted(merged.items())))
        object.__setattr__(self, "offset", extreal.check(self.offset))

    def variables(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.weights)


@dataclass(frozen=True)
class MinAffine:
    terms: Tuple[Affine, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise ValueError("min of affine maps needs at least one term")
        object.__setattr__(self, "terms", terms)

    def variables(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(v for t in self.terms for v in t.variables()))


@dataclass(frozen=True)
class LpLeaf:
    """``op(x_args)``; strict rows in ``op`` make this a strict-LP leaf."""

    op: linprog.LpOperator
    args: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.op.arity:
            raise ValueError(f"LP operator has {self.op.arity} parameter rows but {len(self.args)} arguments")

    @property
    def strict(self) -> bool:
        return bool(self.op.strict)

    def variables(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(self.args))


@dataclass(frozen=True)
class SdpLeaf:
    op: sdpsolve.SdpOperator
    args: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.op.arity:
            raise ValueError(f"SDP operator has {self.op.arity} parameter maps but {len(self.args)} arguments")

    def variables(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(self.args))


@dataclass(frozen=True)
class CaseAtInfinity:
    """``infinite`` if the watched variable is +inf, ``finite`` otherwise."""

    watch: str
    finite: float
    infinite: float

    def __post_init__(self):
        object.__setattr__(self, "finite", float(self.finite))
        object.__setattr__(self, "infinite", float(self.infinite))
        if not (math.isfinite(self.finite) and math.isfinite(self.infinite)):
            raise ValueError("case values must be finite")
        if self.finite > self.infinite:
            raise ValueError("case leaf must be monotone (finite <= infinite)")

    def variables(self) -> Tuple[str, ...]:
        return (self.watch,)


Leaf = Union[NegInf, Const, Affine, MinAffine, LpLeaf, SdpLeaf, CaseAtInfinity]


def eval_leaf(leaf: Leaf, rho: Mapping[str, float]) -> float:
    if isinstance(leaf, NegInf):
        return NEG_INF
    if isinstance(leaf, Const):
        return leaf.value
    if isinstance(leaf, Affine):
        return extreal.add(extreal.ext_sum(extreal.scale(w, rho[v]) for v, w in leaf.weights), leaf.offset)
    if isinstance(leaf, MinAffine):
        return min(eval_leaf(t, rho) for t in leaf.terms)
    if isinstance(leaf, LpLeaf):
        return linprog.evaluate(leaf.op, [rho[v] for v in leaf.args])
    if isinstance(leaf, SdpLeaf):
        return sdpsolve.eval_sdp_operator_cached(leaf.op, tuple(rho[v] for v in leaf.args))
    if isinstance(leaf, CaseAtInfinity):
        return leaf.infinite if rho[leaf.watch] == POS_INF else leaf.finite
    raise TypeError(f"unknown leaf type {type(leaf).__name__}")


# ---------------------------------------------------------------- systems


@dataclass(frozen=True)
class Max:
    children: Tuple[Leaf, ...]

    def __post_init__(self):
        children = tuple(self.children)
        if not children:
            raise ValueError("a maximum needs at least one child")
        object.__setattr__(self, "children", children)

    def __len__(self) -> int:
        return len(self.children)


@dataclass(frozen=True)
class EquationSystem:
    variables: Tuple[str, ...]
    equations: Mapping[str, Max]

    def __post_init__(self):
        variables = tuple(self.variables)
        if len(set(variables)) != len(variables):
            raise ValueError("variables must be pairwise distinct")
        eqs = {}
        for x in variables:
            if x not in self.equations:
                raise ValueError(f"no equation for variable {x!r}")
            rhs = self.equations[x]
            eqs[x] = rhs if isinstance(rhs, Max) else Max(tuple(rhs))
        extra = set(self.equations) - set(variables)
        if extra:
            raise ValueError(f"equations for undeclared variables: {sorted(extra)}")
        known = set(variables)
        for x, rhs in eqs.items():
            for leaf in rhs.children:
                for v in leaf.variables():
                    if v not in known:
                        raise ValueError(f"equation for {x!r} references unknown variable {v!r}")
        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "equations", eqs)

    def __len__(self) -> int:
        return len(self.variables)

    def leaves(self) -> Iterable[Leaf]:
        for rhs in self.equations.values():
            yield from rhs.children

    def is_standard_form(self) -> bool:
        return all(isinstance(rhs.children[0], NegInf) for rhs in self.equations.values())

    def is_conjunctive(self) -> bool:
        return all(len(rhs) == 1 for rhs in self.equations.values())

    def leaf(self, x: str) -> Leaf:
        rhs = self.equations[x]
        if len(rhs) != 1:
            raise ValueError(f"equation for {x!r} is not conjunctive")
        return rhs.children[0]

    def strategy_count(self) -> int:
        return math.prod(len(rhs) for rhs in self.equations.values())

    def has_sdp(self) -> bool:
        return any(isinstance(l, SdpLeaf) for l in self.leaves())


def standard_form(E: EquationSystem) -> EquationSystem:
    """Prepend a -inf child to every equation that lacks one in front."""
    eqs = {}
    for x, rhs in E.equations.items():
        children = rhs.children
        if not isinstance(children[0], NegInf):
            children = (NegInf(),) + children
        eqs[x] = Max(children)
    return EquationSystem(E.variables, eqs)


def bottom(E: EquationSystem) -> Valuation:
    return {x: NEG_INF for x in E.variables}


def kleene_step(E: EquationSystem, rho: Mapping[str, float]) -> Valuation:
    return {x: max(eval_leaf(l, rho) for l in E.equations[x].children) for x in E.variables}


def initial_strategy(E: EquationSystem) -> Strategy:
    return {x: 0 for x in E.variables}


def apply_strategy(E: EquationSystem, sigma: Mapping[str, int]) -> EquationSystem:
    eqs = {}
    for x in E.variables:
        if x not in sigma:
            raise KeyError(f"strategy has no choice for {x!r}")
        i = sigma[x]
        children = E.equations[x].children
        if not 0 <= i < len(children):
            raise IndexError(f"strategy index {i} out of range for {x!r} ({len(children)} children)")
        eqs[x] = Max((children[i],))
    return EquationSystem(E.variables, eqs)


def improve_strategy(
    E: EquationSystem,
    sigma: Mapping[str, int],
    rho: Mapping[str, float],
    eps_improve: float = EPS_IMPROVE,
) -> Strategy:
    """Switch every node whose best child beats the current one by > eps_improve.

    The best child wins (lowest index on ties).  An infinite value beats a
    finite one regardless of the margin.
    """
    new = dict(sigma)
    for x in E.variables:
        values = [eval_leaf(l, rho) for l in E.equations[x].children]
        best = max(range(len(values)), key=lambda i: (values[i], -i))
        if exceeds(values[best], values[sigma[x]], eps_improve):
            new[x] = best
    return new


def exceeds(a: float, b: float, eps: float) -> bool:
    """``a > b + eps`` on the extended reals (infinite gaps always count)."""
    if a == b:
        return False
    if math.isinf(a) or math.isinf(b):
        return a > b
    return a > b + eps


def residual(E: EquationSystem, rho: Mapping[str, float]) -> float:
    """max |rho(x) - [[e]]rho| over finite pairs; +inf if an infinity mismatches."""
    worst = 0.0
    after = kleene_step(E, rho)
    for x in E.variables:
        a, b = rho[x], after[x]
        if a == b:
            continue
        if math.isinf(a) or math.isinf(b):
            return POS_INF
        worst = max(worst, abs(a - b))
    return worst


def is_solution(E: EquationSystem, rho: Mapping[str, float], tol: float) -> bool:
    return residual(E, rho) <= tol


def leq(rho1: Mapping[str, float], rho2: Mapping[str, float], tol: float = 0.0) -> bool:
    """Componentwise ``rho1 <= rho2 + tol`` (infinities compared exactly)."""
    for x, a in rho1.items():
        b = rho2[x]
        if a <= b:
            continue
        if math.isinf(a) or math.isinf(b) or a > b + tol:
            return False
    return True
