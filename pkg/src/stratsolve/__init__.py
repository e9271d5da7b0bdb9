"""Least solutions of max-of-morcave equation systems by strategy improvement."""
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
    apply_strategy,
    eval_leaf,
    improve_strategy,
    kleene_step,
    standard_form,
)
from .evaluate import (
    eval_for_cmorcave,
    eval_for_gen,
    eval_for_max_att,
    solve_least,
    suppresol,
    suppresol_iterate,
    suppresol_partition,
)
from .formats import ValidationError, dump_system, parse_program, parse_system
from .linprog import LpOperator, solve_lp
from .relax import (
    Assign,
    Edge,
    Guard,
    Program,
    QuadraticTemplate,
    analyze,
    build_equations,
    harmonic_oscillator,
)
from .sdpsolve import ConicProblem, NumericalFailure, SdpOperator, solve_conic

__version__ = "0.1.0"
