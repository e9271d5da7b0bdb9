"""Small reference systems used by the fixtures, tests and scripts."""
from __future__ import annotations

from .core import Affine, CaseAtInfinity, Const, EquationSystem, LpLeaf, Max, MinAffine, NegInf, SdpLeaf
from .linprog import LpOperator
from .sdpsolve import shifted_sqrt_operator, sqrt_operator


def sqrt_system() -> EquationSystem:
    """``x = -inf v 1/2 v sqrt(x) v 7/8 + sqrt(x - 47/64)``; least solution x = 2."""
    return EquationSystem(("x",), {
        "x": Max((NegInf(), Const(0.5), SdpLeaf(sqrt_operator(), ("x",)),
                  SdpLeaf(shifted_sqrt_operator(7 / 8, 47 / 64), ("x",)))),
    })


def two_var_system() -> EquationSystem:
    """``x1 = -inf v (x2 + 1 ^ 0)``, ``x2 = -inf v -1 v sqrt(x1)``; least solution (0, 0)."""
    return EquationSystem(("x1", "x2"), {
        "x1": Max((NegInf(), MinAffine((Affine({"x2": 1.0}, 1.0), Affine({}, 0.0))))),
        "x2": Max((NegInf(), Const(-1.0), SdpLeaf(sqrt_operator(), ("x1",)))),
    })


def param_system(strict: bool = False) -> EquationSystem:
    """Conjunctive LP system with ``x1 = sup{y | y <= 0}`` (``y < 0`` if strict)
    and ``x2 = sup{z | 0 <= w <= x1, z <= 1}``; both give (0, 1)."""
    op1 = LpOperator(A=[], c=[1.0], A_fixed=[[1.0]], b_fixed=[0.0], strict={0} if strict else set())
    # variables (w, z): w <= x1 is the parameter row, -w <= 0 and z <= 1 are fixed
    op2 = LpOperator(A=[[1.0, 0.0]], c=[0.0, 1.0], A_fixed=[[-1.0, 0.0], [0.0, 1.0]], b_fixed=[0.0, 1.0])
    return EquationSystem(("x1", "x2"), {
        "x1": Max((LpLeaf(op1, ()),)),
        "x2": Max((LpLeaf(op2, ("x1",)),)),
    })


def infinity_case_system() -> EquationSystem:
    """``x1 = 1``, ``x2 = x1 + x2``, ``x3 = (0 if x2 < inf else 1)``."""
    return EquationSystem(("x1", "x2", "x3"), {
        "x1": Max((Const(1.0),)),
        "x2": Max((Affine({"x1": 1.0, "x2": 1.0}),)),
        "x3": Max((CaseAtInfinity("x2", 0.0, 1.0),)),
    })
