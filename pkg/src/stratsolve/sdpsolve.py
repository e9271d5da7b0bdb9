"""Dense primal-dual interior-point solver for small mixed scalar/PSD problems.

Problems have free scalar variables ``u`` and PSD matrix blocks ``X_j``::

    maximize    c @ u + sum_j <C_j, X_j>
    subject to  F_r @ u + sum_j <M_rj, X_j>  (= or <=)  d_r
                X_j PSD

A bounding box ``|u_i| <= R``, ``trace(X_j) <= R`` is always added, which
makes the primal feasible set compact and the dual strictly feasible.  The
method is an infeasible-start Mehrotra predictor-corrector using the HKM
search direction; inequality rows get nonnegative slacks, so the iterate
lives in ``free x orthant x PSD-blocks``.  A problem whose optimum pushes a
variable onto ``0.99 R`` is reported unbounded; infeasibility is decided by
an elastic phase-1 problem.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from . import extreal
from .extreal import NEG_INF, POS_INF
from .linprog import Status

BOX_RADIUS = 1e6
MAX_ITERS = 200
TOL_GAP = 1e-7
TOL_FEAS = 1e-7
TOL_PSD = 1e-8
# accepted when the strict tolerances cannot be reached (degenerate problems)
TOL_LOOSE = 1e-5
# iterates on the bounding box are badly conditioned; they only need to be
# accurate enough to tell that the box is active
TOL_LOOSE_BOX = 1e-4


class NumericalFailure(RuntimeError):
    """The interior-point method did not converge; no status can be trusted."""


def symmetrize(M, tol: float = 1e-12) -> np.ndarray:
    """Validate (up to ``tol``) and mirror a square matrix into exact symmetry."""
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    if np.max(np.abs(M - M.T), initial=0.0) > tol:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (M + M.T)


def inner(A: np.ndarray, B: np.ndarray) -> float:
    """A • B = Tr(A^T B)."""
    return float(np.sum(A * B))


# ---------------------------------------------------------------- problem


@dataclass
class Row:
    scalars: dict
    blocks: dict
    rel: str
    rhs: float


@dataclass
class ConicProblem:
    """Builder for a maximization problem over free scalars and PSD blocks."""

    nscalars: int = 0
    block_dims: list = field(default_factory=list)
    c: dict = field(default_factory=dict)
    C: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    def add_scalar(self) -> int:
        self.nscalars += 1
        return self.nscalars - 1

    def add_block(self, n: int) -> int:
        self.block_dims.append(int(n))
        return len(self.block_dims) - 1

    def add_row(self, scalars=None, blocks=None, rel: str = "<=", rhs: float = 0.0) -> None:
        if rel not in ("<=", "="):
            raise ValueError(f"unknown relation {rel!r}")
        rhs = float(rhs)
        if not math.isfinite(rhs):
            raise ValueError("row right-hand sides must be finite")
        blocks = {j: np.asarray(M, dtype=float) for j, M in (blocks or {}).items()}
        for j, M in blocks.items():
            if M.shape != (self.block_dims[j],) * 2:
                raise ValueError(f"block {j} expects {self.block_dims[j]}x{self.block_dims[j]}, got {M.shape}")
        self.rows.append(Row(dict(scalars or {}), blocks, rel, rhs))

    def set_objective(self, scalars=None, blocks=None) -> None:
        self.c = dict(scalars or {})
        self.C = {j: np.asarray(M, dtype=float) for j, M in (blocks or {}).items()}

    def copy_with_objective(self, scalars=None, blocks=None) -> "ConicProblem":
        P = ConicProblem(self.nscalars, list(self.block_dims), {}, {}, self.rows)
        P.set_objective(scalars, blocks)
        return P


@dataclass
class ConicResult:
    status: Status
    value: Optional[float] = None
    u: Optional[np.ndarray] = None
    blocks: Optional[list] = None
    dual_value: Optional[float] = None
    y: Optional[np.ndarray] = None
    iterations: int = 0
    primal_residual: float = math.nan
    dual_residual: float = math.nan
    gap: float = math.nan

    def to_extreal(self) -> float:
        if self.status is Status.INFEASIBLE:
            return NEG_INF
        if self.status is Status.UNBOUNDED:
            return POS_INF
        return float(self.value)


# ---------------------------------------------------------------- standard form


@dataclass
class _Standard:
    """max cf@u + cl@xl + sum <C_j,X_j>  s.t.  Af u + Al xl + sum A_j(X_j) = b."""

    b: np.ndarray
    Af: np.ndarray
    Al: np.ndarray
    Aj: list  # per block: (m, n, n)
    cf: np.ndarray
    cl: np.ndarray
    Cj: list
    box_slacks: np.ndarray  # indices into xl belonging to box rows
    nrows_user: int


def _standardize(P: ConicProblem, R: float, elastic: bool = False) -> _Standard:
    p = P.nscalars
    dims = P.block_dims
    ineq = [r for r, row in enumerate(P.rows) if row.rel == "<="]
    nuser = len(P.rows)
    nbox = 2 * p + len(dims)
    m = nuser + nbox
    nslack = len(ineq)
    nel = 2 * nuser if elastic else 0
    nl = nslack + nbox + nel

    b = np.zeros(m)
    Af = np.zeros((m, p))
    Al = np.zeros((m, nl))
    Aj = [np.zeros((m, n, n)) for n in dims]
    for r, row in enumerate(P.rows):
        b[r] = row.rhs
        for i, a in row.scalars.items():
            Af[r, i] += a
        for j, M in row.blocks.items():
            Aj[j][r] += M
    for s, r in enumerate(ineq):
        Al[r, s] = 1.0
    # box rows
    r = nuser
    box_slacks = np.arange(nslack, nslack + nbox)
    for i in range(p):
        Af[r, i] = 1.0
        Al[r, nslack + 2 * i] = 1.0
        b[r] = R
        Af[r + 1, i] = -1.0
        Al[r + 1, nslack + 2 * i + 1] = 1.0
        b[r + 1] = R
        r += 2
    for j, n in enumerate(dims):
        Aj[j][r] = np.eye(n)
        Al[r, nslack + 2 * p + j] = 1.0
        b[r] = R
        r += 1

    cf = np.zeros(p)
    cl = np.zeros(nl)
    Cj = [np.zeros((n, n)) for n in dims]
    if elastic:
        base = nslack + nbox
        for r in range(nuser):
            Al[r, base + 2 * r] = 1.0
            Al[r, base + 2 * r + 1] = -1.0
        cl[base:] = -1.0
    else:
        for i, a in P.c.items():
            cf[i] += a
        for j, M in P.C.items():
            Cj[j] += M
    return _Standard(b, Af, Al, Aj, cf, cl, Cj, box_slacks, nuser)


def _max_step_psd(X: np.ndarray, dX: np.ndarray) -> float:
    try:
        L = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        return 0.0
    Linv_dX = sla.solve_triangular(L, dX, lower=True)
    S = sla.solve_triangular(L, Linv_dX.T, lower=True)
    lam = np.linalg.eigvalsh(0.5 * (S + S.T))[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not neg.any():
        return math.inf
    return float(np.min(-x[neg] / dx[neg]))


def _on_box(u: np.ndarray, X: list, R: float) -> bool:
    edge = 0.99 * R
    return bool(np.any(np.abs(u) >= edge)) or any(np.trace(Xm) >= edge for Xm in X)


@dataclass
class _IpmOutcome:
    converged: bool
    u: np.ndarray
    xl: np.ndarray
    X: list
    y: np.ndarray
    zl: np.ndarray
    Z: list
    pobj: float
    dobj: float
    iterations: int
    pres: float
    dres: float
    gap: float
    diverged: bool = False


def _ipm(S: _Standard, R: float, max_iters: int, tol_gap: float, tol_feas: float,
         centering: float = 0.0, step: float = 0.95) -> _IpmOutcome:
    m = S.b.size
    p = S.Af.shape[1]
    nl = S.Al.shape[1]
    dims = [A.shape[1] for A in S.Aj]
    N = nl + sum(dims)

    # starting point: everything O(xi) except box slacks which start at R
    row_norm = np.sqrt(
        np.sum(S.Af ** 2, axis=1) + np.sum(S.Al ** 2, axis=1)
        + sum(np.sum(A ** 2, axis=(1, 2)) for A in S.Aj)
    )
    user = np.arange(S.nrows_user)
    xi = max(10.0, math.sqrt(max(dims, default=1)),
             float(np.max((1.0 + np.abs(S.b[user])) / (1.0 + row_norm[user]), initial=1.0)))
    cnorm = max([np.abs(S.cf).max(initial=0.0), np.abs(S.cl).max(initial=0.0)]
                + [np.abs(C).max(initial=0.0) for C in S.Cj])
    eta = max(10.0, math.sqrt(max(dims, default=1)), cnorm, float(row_norm.max(initial=0.0)))
    u = np.zeros(p)
    xl = np.full(nl, xi)
    zl = np.full(nl, eta)
    X = [xi * np.eye(n) for n in dims]
    Z = [eta * np.eye(n) for n in dims]
    boxed = S.box_slacks
    xl[boxed] = R
    # the trace rows start near R - n*xi
    for j, n in enumerate(dims):
        xl[boxed[2 * p + j]] = max(R - n * xi, xi)
    zl[boxed] = xi * eta / xl[boxed]
    y = np.zeros(m)

    bnorm = 1.0 + np.abs(S.b)
    Cscale = 1.0 + cnorm
    AlT = S.Al.T
    it = 0
    pres = dres = gap = math.inf
    pobj = dobj = math.nan
    best, best_err, best_it = None, math.inf, 0
    stalled = 0
    pres_hist = []
    while True:
        # residuals
        AX = S.Af @ u + S.Al @ xl
        for j, A in enumerate(S.Aj):
            AX = AX + np.einsum("kab,ab->k", A, X[j])
        rp = S.b - AX
        rf = S.cf - S.Af.T @ y
        rl = S.cl + zl - AlT @ y
        Rj = [S.Cj[j] + Z[j] - np.einsum("k,kab->ab", y, A) for j, A in enumerate(S.Aj)]
        pobj = float(S.cf @ u + S.cl @ xl + sum(inner(S.Cj[j], X[j]) for j in range(len(dims))))
        dobj = float(S.b @ y)
        pres = float(np.max(np.abs(rp) / bnorm, initial=0.0))
        dres = max([float(np.max(np.abs(rf), initial=0.0)), float(np.max(np.abs(rl), initial=0.0))]
                   + [float(np.max(np.abs(Rm), initial=0.0)) for Rm in Rj]) / Cscale
        gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        mu = (xl @ zl + sum(inner(X[j], Z[j]) for j in range(len(dims)))) / max(N, 1)
        if pres <= tol_feas and dres <= tol_feas and gap <= tol_gap:
            return _IpmOutcome(True, u, xl, X, y, zl, Z, pobj, dobj, it, pres, dres, gap)
        # a dual objective this far below any primal value certifies infeasibility
        if dres <= 1e-6 and dobj < -1e3 * (1.0 + cnorm) * R * max(N, 1):
            return _IpmOutcome(False, u, xl, X, y, zl, Z, pobj, dobj, it, pres, dres, gap, diverged=True)
        err = max(pres, dres, gap)
        if err < best_err:
            best_err = err
            ok = err <= TOL_LOOSE or (err <= TOL_LOOSE_BOX and _on_box(u, X, R))
            best = _IpmOutcome(ok, u, xl, X, y, zl, Z, pobj, dobj, it, pres, dres, gap)
            best_it = it
        # primal residual not shrinking: most likely infeasible, let phase 1 decide
        pres_hist.append(pres)
        if it >= 20 and pres > tol_feas and pres > 0.5 * pres_hist[-11] and not (best and best.converged):
            return _IpmOutcome(False, u, xl, X, y, zl, Z, pobj, dobj, it, pres, dres, gap)
        # no progress for a while: give up on the strict tolerances
        if best is not None and best.converged and it - best_it >= 25:
            stalled = 5
        if it >= max_iters or stalled >= 5:
            if best is not None and best.converged:
                best.iterations = it
                return best
            return _IpmOutcome(False, u, xl, X, y, zl, Z, pobj, dobj, it, pres, dres, gap)
        it += 1

        try:
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                # Schur complement
                Zinv = []
                for j in range(len(dims)):
                    Zinv.append(np.linalg.inv(Z[j]))
                D = xl / zl
                M = (S.Al * D) @ AlT
                for j, A in enumerate(S.Aj):
                    W = np.einsum("ab,kbc,cd->kad", X[j], A, Zinv[j])
                    M += np.einsum("iab,kba->ik", A, W)
                K = np.zeros((m + p, m + p))
                K[:m, :m] = -M
                K[:m, m:] = S.Af
                K[m:, :m] = S.Af.T
                # tiny regularization keeps rows without cone variables solvable
                K[:m, :m] -= np.diag(1e-14 * (1.0 + np.abs(np.diag(M))))
                lu = sla.lu_factor(K, check_finite=False)

                def direction(gl, Gj):
                    h = rp - S.Al @ (gl + D * rl)
                    for j, A in enumerate(S.Aj):
                        T = Gj[j] + X[j] @ Rj[j] @ Zinv[j]
                        h = h - np.einsum("kab,ba->k", A, T)
                    sol = sla.lu_solve(lu, np.concatenate([h, rf]), check_finite=False)
                    dy, du = sol[:m], sol[m:]
                    dzl = AlT @ dy - rl
                    dxl = gl - D * dzl
                    dZ, dX = [], []
                    for j, A in enumerate(S.Aj):
                        dz = np.einsum("k,kab->ab", dy, A) - Rj[j]
                        dz = 0.5 * (dz + dz.T)
                        dx = Gj[j] - X[j] @ dz @ Zinv[j]
                        dZ.append(dz)
                        dX.append(0.5 * (dx + dx.T))
                    return du, dxl, dX, dy, dzl, dZ

                def steps(dxl, dX, dzl, dZ):
                    ap = _max_step_lp(xl, dxl)
                    ad = _max_step_lp(zl, dzl)
                    for j in range(len(dims)):
                        ap = min(ap, _max_step_psd(X[j], dX[j]))
                        ad = min(ad, _max_step_psd(Z[j], dZ[j]))
                    return ap, ad

                # predictor
                du, dxl, dX, dy, dzl, dZ = direction(-xl, [-Xm for Xm in X])
                ap, ad = steps(dxl, dX, dzl, dZ)
                ap, ad = min(1.0, ap), min(1.0, ad)
                mu_aff = ((xl + ap * dxl) @ (zl + ad * dzl)
                          + sum(inner(X[j] + ap * dX[j], Z[j] + ad * dZ[j]) for j in range(len(dims)))) / max(N, 1)
                sigma = min(1.0, max(centering, (mu_aff / mu) ** 3 if mu > 0 else 0.0))
                # corrector
                gl = sigma * mu / zl - xl - dxl * dzl / zl
                Gj = [sigma * mu * Zinv[j] - X[j] - dX[j] @ dZ[j] @ Zinv[j] for j in range(len(dims))]
                du, dxl, dX, dy, dzl, dZ = direction(gl, Gj)
                ap, ad = steps(dxl, dX, dzl, dZ)
                ap, ad = min(1.0, step * ap), min(1.0, step * ad)
                stalled = stalled + 1 if max(ap, ad) < 1e-6 else 0
        except (ValueError, FloatingPointError, np.linalg.LinAlgError):
            # the Newton system broke down; fall back on the best iterate seen
            if best is not None and best.converged:
                best.iterations = it
                return best
            return _IpmOutcome(False, u, xl, X, y, zl, Z, pobj, dobj, it, pres, dres, gap)
        u = u + ap * du
        xl = xl + ap * dxl
        X = [X[j] + ap * dX[j] for j in range(len(dims))]
        y = y + ad * dy
        zl = zl + ad * dzl
        Z = [Z[j] + ad * dZ[j] for j in range(len(dims))]


def _reduce_faces(P: ConicProblem, tol: float = 1e-12):
    """Restrict PSD blocks to the faces forced by rows ``B•X_j <= 0``, ``B PSD``.

    Such a row implies ``B•X_j = 0``, hence ``X_j = V W V^T`` with ``V`` a
    basis of the null space of ``B``.  Without this step the interior-point
    method approaches these faces at a rate near sqrt(residual), because the
    dual optimum is not attained there.  Returns ``(problem, bases)`` or
    ``None`` if some row is infeasible on its own.
    """
    bases = [np.eye(n) for n in P.block_dims]
    changed = True
    while changed:
        changed = False
        for row in P.rows:
            if any(row.scalars.values()) or len(row.blocks) != 1:
                continue
            ((j, M),) = row.blocks.items()
            V = bases[j]
            if V.shape[1] == 0:
                continue
            w, U = np.linalg.eigh(V.T @ M @ V)
            scale = max(1.0, float(np.abs(w).max(initial=0.0)))
            if w[0] < -tol * scale:
                continue
            if row.rhs < -tol:
                return None
            if row.rhs > tol:
                continue
            keep = w <= tol * scale
            if keep.all():
                continue
            bases[j] = V @ U[:, keep]
            changed = True
    if all(V.shape[1] == n for V, n in zip(bases, P.block_dims)):
        return P, bases
    remap = {}
    Q = ConicProblem(nscalars=P.nscalars)
    for j, V in enumerate(bases):
        if V.shape[1]:
            remap[j] = Q.add_block(V.shape[1])

    def reduce(blocks):
        return {remap[j]: bases[j].T @ M @ bases[j] for j, M in blocks.items() if j in remap}

    for row in P.rows:
        scalars = {i: a for i, a in row.scalars.items() if a}
        blocks = {j: M for j, M in reduce(row.blocks).items() if np.any(np.abs(M) > tol)}
        if not scalars and not blocks:
            if (row.rel == "<=" and row.rhs < -tol) or (row.rel == "=" and abs(row.rhs) > tol):
                return None
            continue
        Q.add_row(scalars, blocks, row.rel, row.rhs)
    Q.set_objective(P.c, reduce(P.C))
    return Q, bases


def solve_conic(
    P: ConicProblem,
    box_radius: float = BOX_RADIUS,
    max_iters: int = MAX_ITERS,
    tol_gap: float = TOL_GAP,
    tol_feas: float = TOL_FEAS,
    centering: float = 0.0,
) -> ConicResult:
    """Maximize the objective of ``P``; raises :class:`NumericalFailure`."""
    R = float(box_radius)
    reduced = _reduce_faces(P)
    if reduced is None:
        return ConicResult(Status.INFEASIBLE)
    Q, bases = reduced
    if Q is not P:
        res = solve_conic(Q, box_radius, max_iters, tol_gap, tol_feas, centering)
        if res.blocks is not None:
            full, k = [], 0
            for V, n in zip(bases, P.block_dims):
                if V.shape[1]:
                    full.append(V @ res.blocks[k] @ V.T)
                    k += 1
                else:
                    full.append(np.zeros((n, n)))
            res.blocks = full
        res.y = None
        return res
    S = _standardize(P, R)
    out = _ipm(S, R, max_iters, tol_gap, tol_feas, centering)
    if not out.converged:
        if _phase1_infeasible(P, R, max_iters, tol_feas, centering):
            return ConicResult(Status.INFEASIBLE, iterations=out.iterations,
                               primal_residual=out.pres, dual_residual=out.dres, gap=out.gap)
        raise NumericalFailure(
            f"interior point did not converge after {out.iterations} iterations "
            f"(primal residual {out.pres:.2e}, dual residual {out.dres:.2e}, gap {out.gap:.2e})"
        )
    status = Status.UNBOUNDED if _on_box(out.u, out.X, R) else Status.OPTIMAL
    return ConicResult(
        status,
        value=out.pobj if status is Status.OPTIMAL else None,
        u=out.u,
        blocks=out.X,
        dual_value=out.dobj,
        y=out.y[: S.nrows_user],
        iterations=out.iterations,
        primal_residual=out.pres,
        dual_residual=out.dres,
        gap=out.gap,
    )


def _phase1_infeasible(P: ConicProblem, R: float, max_iters: int, tol_feas: float,
                       centering: float) -> bool:
    S = _standardize(P, R, elastic=True)
    out = _ipm(S, R, max_iters, 1e-9, tol_feas, centering)
    if not out.converged:
        raise NumericalFailure(
            f"phase-1 problem did not converge after {out.iterations} iterations"
        )
    scale = 1.0 + max((abs(row.rhs) for row in P.rows), default=0.0)
    return -out.pobj > tol_feas * scale


def solve_conic_robust(P: ConicProblem, box_radius: float = BOX_RADIUS, **kw) -> ConicResult:
    """``solve_conic`` with fallbacks for badly conditioned problems.

    Iterates pressed against a large box are the usual reason for failure,
    so the first retry shrinks the box by 100.  An optimum strictly inside
    the smaller box is the true optimum (the problem is convex); an optimum
    on it is reported as unbounded.  The last retry adds centering.
    """
    try:
        return solve_conic(P, box_radius, **kw)
    except NumericalFailure:
        pass
    try:
        return solve_conic(P, box_radius / 100.0, **kw)
    except NumericalFailure:
        pass
    kw = dict(kw)
    kw["max_iters"] = 2 * kw.get("max_iters", MAX_ITERS)
    kw["centering"] = max(kw.get("centering", 0.0), 0.1)
    return solve_conic(P, box_radius, **kw)


# ---------------------------------------------------------------- SDP operators


@dataclass(eq=False)
class SdpOperator:
    """``b -> sup{C•X | X PSD, A_eq(X) = a, B(X) <= b, B_fixed(X) <= b_fixed}``."""

    A_eq: list
    a: np.ndarray
    B: list
    C: np.ndarray
    B_fixed: list = field(default_factory=list)
    b_fixed: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.C = symmetrize(self.C)
        n = self.C.shape[0]
        self.A_eq = [symmetrize(M) for M in self.A_eq]
        self.B = [symmetrize(M) for M in self.B]
        self.B_fixed = [symmetrize(M) for M in self.B_fixed]
        self.a = np.asarray(self.a, dtype=float).ravel()
        self.b_fixed = np.asarray(self.b_fixed, dtype=float).ravel()
        if len(self.A_eq) != self.a.size:
            raise ValueError("A_eq and a disagree in length")
        if len(self.B_fixed) != self.b_fixed.size:
            raise ValueError("B_fixed and b_fixed disagree in length")
        for M in self.A_eq + self.B + self.B_fixed:
            if M.shape != (n, n):
                raise ValueError(f"all matrices must be {n}x{n}")
        if not (np.all(np.isfinite(self.a)) and np.all(np.isfinite(self.b_fixed))):
            raise ValueError("SDP operator data must be finite")

    @property
    def dim(self) -> int:
        return self.C.shape[0]

    @property
    def arity(self) -> int:
        return len(self.B)

    def problem(self, b: Sequence[float]) -> Optional[ConicProblem]:
        """Conic problem for parameters ``b``; ``None`` if some b_i is -inf."""
        if len(b) != self.arity:
            raise ValueError(f"SDP operator expects {self.arity} parameters, got {len(b)}")
        b = [extreal.check(v) for v in b]
        if any(v == NEG_INF for v in b):
            return None
        P = ConicProblem()
        j = P.add_block(self.dim)
        for M, rhs in zip(self.A_eq, self.a):
            P.add_row(blocks={j: M}, rel="=", rhs=rhs)
        for M, rhs in zip(self.B, b):
            if rhs != POS_INF:
                P.add_row(blocks={j: M}, rel="<=", rhs=rhs)
        for M, rhs in zip(self.B_fixed, self.b_fixed):
            P.add_row(blocks={j: M}, rel="<=", rhs=rhs)
        P.set_objective(blocks={j: self.C})
        return P


def eval_sdp_operator(op: SdpOperator, b: Sequence[float], box_radius: float = BOX_RADIUS) -> float:
    P = op.problem(b)
    if P is None:
        return NEG_INF
    return solve_conic_robust(P, box_radius).to_extreal()


@functools.lru_cache(maxsize=8192)
def eval_sdp_operator_cached(op: SdpOperator, b: tuple) -> float:
    """Memoized :func:`eval_sdp_operator` (operators hash by identity)."""
    return eval_sdp_operator(op, b)


def sqrt_operator() -> SdpOperator:
    """The square root b -> sup{x | x^2 <= b} as an SDP operator."""
    return SdpOperator(
        A_eq=[np.array([[1.0, 0.0], [0.0, 0.0]])],
        a=np.array([1.0]),
        B=[np.array([[0.0, 0.0], [0.0, 1.0]])],
        C=np.array([[0.0, 0.5], [0.5, 0.0]]),
    )


def shifted_sqrt_operator(offset: float, shift: float) -> SdpOperator:
    """b -> offset + sqrt(b - shift), using X_11 = 1 to carry the constants."""
    return SdpOperator(
        A_eq=[np.array([[1.0, 0.0], [0.0, 0.0]])],
        a=np.array([1.0]),
        B=[np.array([[shift, 0.0], [0.0, 1.0]])],
        C=np.array([[offset, 0.5], [0.5, 0.0]]),
    )


def lp_as_sdp(A, c) -> SdpOperator:
    """Diagonal SDP operator equivalent to ``b -> sup{c@y | A y <= b}``.

    ``y`` is written as ``diag(X)[1:m+1] - diag(X)[m+1:]`` so that the free
    LP variables become nonnegative diagonal entries of one PSD block.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    c = np.asarray(c, dtype=float).ravel()
    k, m = A.shape
    n = 2 * m

    def diag(v):
        return np.diag(np.asarray(v, dtype=float))

    return SdpOperator(
        A_eq=[],
        a=np.zeros(0),
        B=[diag(np.concatenate([A[i], -A[i]])) for i in range(k)],
        C=diag(np.concatenate([c, -c])),
    )
