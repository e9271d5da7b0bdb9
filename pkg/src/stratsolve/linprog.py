"""Dense two-phase simplex and parametrized LP operators.

``solve_lp`` maximizes ``c @ x`` over ``{x | A x <= b, A_eq x = b_eq}`` with
``x`` free.  Free variables are split into two nonnegative parts, every row
gets a slack (inequalities) or an artificial (equalities, negative right
sides), and both phases pivot with Bland's rule, so the method cannot cycle.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import extreal
from .extreal import NEG_INF, POS_INF

TOL_FEAS = 1e-8
TOL_PIVOT = 1e-10


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LpResult:
    status: Status
    value: Optional[float] = None
    x: Optional[np.ndarray] = None
    phase1_value: float = 0.0
    pivots: int = 0

    def to_extreal(self) -> float:
        if self.status is Status.INFEASIBLE:
            return NEG_INF
        if self.status is Status.UNBOUNDED:
            return POS_INF
        return float(self.value)


class _Unbounded(Exception):
    pass


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])


def _bland(T, basis, ncols, tol_pivot, max_pivots):
    """Minimize the objective held in the last row of T (Bland's rule).

    The last row stores reduced costs and, in its last entry, minus the
    current objective value.  Only columns < ncols may enter.
    """
    pivots = 0
    nrows = T.shape[0] - 1
    while True:
        d = T[-1, :ncols]
        candidates = np.flatnonzero(d < -tol_pivot)
        if candidates.size == 0:
            return pivots
        col = int(candidates[0])
        colv = T[:nrows, col]
        pos = colv > tol_pivot
        if not pos.any():
            raise _Unbounded
        ratios = np.full(nrows, np.inf)
        ratios[pos] = T[:nrows, -1][pos] / colv[pos]
        best = ratios.min()
        # ties: smallest basic variable index
        tied = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
        row = int(min(tied, key=lambda i: basis[i]))
        _pivot(T, row, col)
        basis[row] = col
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit exceeded")


def solve_lp(
    A,
    b,
    c,
    maximize: bool = True,
    A_eq=None,
    b_eq=None,
    tol_feas: float = TOL_FEAS,
    tol_pivot: float = TOL_PIVOT,
) -> LpResult:
    """Solve ``max/min c@x  s.t.  A x <= b, A_eq x = b_eq`` with x free."""
    c = np.asarray(c, dtype=float).ravel()
    m = c.size
    A = np.asarray(A, dtype=float).reshape(-1, m) if np.size(A) else np.zeros((0, m))
    b = np.asarray(b, dtype=float).ravel()
    if A_eq is None:
        A_eq = np.zeros((0, m))
        b_eq = np.zeros(0)
    A_eq = np.asarray(A_eq, dtype=float).reshape(-1, m) if np.size(A_eq) else np.zeros((0, m))
    b_eq = np.asarray(b_eq, dtype=float).ravel()
    if A.shape[0] != b.size or A_eq.shape[0] != b_eq.size:
        raise ValueError(
            f"dimension mismatch: A {A.shape} vs b {b.shape}, A_eq {A_eq.shape} vs b_eq {b_eq.shape}"
        )
    for arr in (A, b, c, A_eq, b_eq):
        if not np.all(np.isfinite(arr)):
            raise ValueError("solve_lp needs finite data")
    obj = c if maximize else -c

    k, q = A.shape[0], A_eq.shape[0]
    nrows = k + q
    # columns: x+ (m) | x- (m) | slacks (k) | artificials (na) | rhs
    sign = np.ones(nrows)
    rhs = np.concatenate([b, b_eq])
    sign[rhs < 0] = -1.0
    needs_art = np.concatenate([b < 0, np.ones(q, dtype=bool)])
    art_rows = np.flatnonzero(needs_art)
    na = art_rows.size
    nstruct = 2 * m + k
    T = np.zeros((nrows + 1, nstruct + na + 1))
    Aall = np.vstack([A, A_eq])
    T[:nrows, :m] = Aall
    T[:nrows, m : 2 * m] = -Aall
    T[np.arange(k), 2 * m + np.arange(k)] = 1.0
    T[:nrows, -1] = rhs
    T[:nrows] *= sign[:, None]
    basis = np.empty(nrows, dtype=int)
    basis[:k] = 2 * m + np.arange(k)
    for j, r in enumerate(art_rows):
        T[r, nstruct + j] = 1.0
        basis[r] = nstruct + j
    max_pivots = 50 * (nrows + nstruct + na + 10)

    pivots = 0
    phase1 = 0.0
    if na:
        # phase 1: minimize the sum of artificials
        T[-1, :] = 0.0
        T[-1, nstruct : nstruct + na] = 1.0
        T[-1] -= T[art_rows].sum(axis=0)
        pivots += _bland(T, basis, nstruct + na, tol_pivot, max_pivots)
        phase1 = float(-T[-1, -1])
        scale = 1.0 + float(np.abs(rhs).max(initial=0.0))
        if phase1 > tol_feas * scale:
            return LpResult(Status.INFEASIBLE, phase1_value=phase1, pivots=pivots)
        # drive remaining artificials out of the basis, dropping redundant rows
        keep = np.ones(nrows + 1, dtype=bool)
        for r in range(nrows):
            if basis[r] >= nstruct:
                row = T[r, :nstruct]
                nz = np.flatnonzero(np.abs(row) > tol_pivot)
                if nz.size:
                    _pivot(T, r, int(nz[0]))
                    basis[r] = int(nz[0])
                    pivots += 1
                else:
                    keep[r] = False
        T = np.delete(T[keep], np.s_[nstruct : nstruct + na], axis=1)
        basis = basis[keep[:nrows]]
        nrows = basis.size

    # phase 2: minimize -obj
    cost = np.concatenate([-obj, obj, np.zeros(k)])
    T[-1, :] = 0.0
    T[-1, :nstruct] = cost
    if nrows:
        T[-1] -= cost[basis] @ T[:nrows]
    try:
        pivots += _bland(T, basis, nstruct, tol_pivot, max_pivots)
    except _Unbounded:
        return LpResult(Status.UNBOUNDED, phase1_value=phase1, pivots=pivots)
    z = np.zeros(nstruct)
    z[basis] = T[:nrows, -1]
    x = z[:m] - z[m : 2 * m]
    value = float(c @ x)
    return LpResult(Status.OPTIMAL, value=value, x=x, phase1_value=phase1, pivots=pivots)


@dataclass(eq=False)
class LpOperator:
    """``b -> sup{c@y | A y <= b, A_fixed y <= b_fixed}``.

    Rows of ``A`` are parameter rows (one per argument of the owning leaf);
    ``A_fixed``/``b_fixed`` are constant rows.  ``strict`` holds indices of
    strict rows, counted over parameter rows first and fixed rows after.
    """

    A: np.ndarray
    c: np.ndarray
    A_fixed: Optional[np.ndarray] = None
    b_fixed: Optional[np.ndarray] = None
    strict: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        m = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, m) if np.size(self.A) else np.zeros((0, m))
        if self.A_fixed is None or np.size(self.A_fixed) == 0:
            self.A_fixed = np.zeros((0, m))
            self.b_fixed = np.zeros(0)
        self.A_fixed = np.asarray(self.A_fixed, dtype=float).reshape(-1, m)
        self.b_fixed = np.asarray(self.b_fixed, dtype=float).ravel()
        if self.A_fixed.shape[0] != self.b_fixed.size:
            raise ValueError("A_fixed and b_fixed disagree in row count")
        for arr in (self.A, self.c, self.A_fixed, self.b_fixed):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP operator entries must be finite")
        self.strict = frozenset(int(i) for i in self.strict)
        nrows = self.A.shape[0] + self.A_fixed.shape[0]
        if any(i < 0 or i >= nrows for i in self.strict):
            raise ValueError("strict row index out of range")

    @property
    def arity(self) -> int:
        return self.A.shape[0]

    @property
    def nvars(self) -> int:
        return self.c.size

    def instantiate(self, b: Sequence[float]):
        """Concrete rows for parameter values ``b``.

        Returns ``None`` if some parameter is -inf (no feasible point),
        otherwise ``(A_rows, b_rows, strict_mask)`` with +inf rows dropped.
        """
        b = [extreal.check(v) for v in b]
        if len(b) != self.arity:
            raise ValueError(f"LP operator expects {self.arity} parameters, got {len(b)}")
        if any(v == NEG_INF for v in b):
            return None
        keep = [i for i, v in enumerate(b) if v != POS_INF]
        A_rows = np.vstack([self.A[keep], self.A_fixed])
        b_rows = np.concatenate([np.asarray([b[i] for i in keep], dtype=float), self.b_fixed])
        idx = keep + [self.arity + j for j in range(self.A_fixed.shape[0])]
        strict = np.array([i in self.strict for i in idx], dtype=bool)
        return A_rows, b_rows, strict


def eval_lp_operator(op: LpOperator, b: Sequence[float]) -> float:
    """Value of the LP operator at ``b`` in the extended reals (strict flags ignored)."""
    rows = op.instantiate(b)
    if rows is None:
        return NEG_INF
    A_rows, b_rows, _ = rows
    return solve_lp(A_rows, b_rows, op.c).to_extreal()


def eval_strict_lp(op: LpOperator, b: Sequence[float], tol: float = TOL_FEAS) -> float:
    """Value of an LP operator some of whose rows are strict inequalities.

    The open set is empty iff the largest uniform margin ``t`` (capped at 1)
    that fits into the strict rows is not positive.  Otherwise the supremum
    equals the one over the closure.
    """
    rows = op.instantiate(b)
    if rows is None:
        return NEG_INF
    A_rows, b_rows, strict = rows
    if strict.any():
        m = op.nvars
        A_t = np.hstack([A_rows, strict[:, None].astype(float)])
        cap = np.zeros((1, m + 1))
        cap[0, -1] = 1.0
        A_t = np.vstack([A_t, cap])
        b_t = np.concatenate([b_rows, [1.0]])
        c_t = np.zeros(m + 1)
        c_t[-1] = 1.0
        res = solve_lp(A_t, b_t, c_t)
        if res.status is not Status.OPTIMAL or res.value <= tol:
            return NEG_INF
    return solve_lp(A_rows, b_rows, op.c).to_extreal()


def evaluate(op: LpOperator, b: Sequence[float]) -> float:
    if op.strict:
        return eval_strict_lp(op, b)
    return eval_lp_operator(op, b)
