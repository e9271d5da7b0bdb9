import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stratsolve.linprog import LpOperator, Status, eval_lp_operator
from stratsolve.sdpsolve import (
    TOL_FEAS,
    TOL_PSD,
    ConicProblem,
    NumericalFailure,
    SdpOperator,
    eval_sdp_operator,
    inner,
    lp_as_sdp,
    shifted_sqrt_operator,
    solve_conic,
    solve_conic_robust,
    sqrt_operator,
    symmetrize,
)

from randgen import comparable_pair, random_sdp_operator

INF = math.inf


def _cvxopt_value(op: SdpOperator, b):
    """Reference value of an SDP operator at finite ``b`` from cvxopt (None if undecided)."""
    cvxopt = pytest.importorskip("cvxopt")
    from cvxopt import matrix, solvers

    n = op.dim
    pairs = [(i, j) for i in range(n) for j in range(i, n)]

    def coeffs(M):
        return [M[i, j] * (1.0 if i == j else 2.0) for i, j in pairs]

    Gs = np.zeros((n * n, len(pairs)))
    for k, (i, j) in enumerate(pairs):
        Gs[i * n + j, k] = -1.0
        Gs[j * n + i, k] = -1.0
    G = np.array([coeffs(M) for M in list(op.B) + list(op.B_fixed)]).reshape(-1, len(pairs))
    h = np.concatenate([np.asarray(b, dtype=float), op.b_fixed])
    A = np.array([coeffs(M) for M in op.A_eq]).reshape(-1, len(pairs))
    solvers.options.update(show_progress=False, abstol=1e-10, reltol=1e-10, feastol=1e-10)
    try:
        sol = solvers.sdp(matrix(-np.array(coeffs(op.C))), Gl=matrix(G), hl=matrix(h),
                          Gs=[matrix(Gs)], hs=[matrix(np.zeros((n, n)))],
                          A=matrix(A) if A.size else None, b=matrix(op.a) if A.size else None)
    except (ArithmeticError, ValueError):
        # cvxopt breaks down on some degenerate instances
        return None
    if sol["status"] == "optimal":
        return -sol["primal objective"]
    if sol["status"] == "primal infeasible":
        return -INF
    if sol["status"] == "dual infeasible":
        return INF
    return None


# ---------------------------------------------------------------- square root


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 100.0))
def test_sqrt_closed_form(b):
    assert abs(eval_sdp_operator(sqrt_operator(), [b]) - math.sqrt(b)) <= 1e-5


def test_sqrt_statuses():
    op = sqrt_operator()
    assert eval_sdp_operator(op, [-1.0]) == -INF
    assert eval_sdp_operator(op, [INF]) == INF
    assert eval_sdp_operator(op, [-INF]) == -INF
    assert eval_sdp_operator(op, [0.0]) == pytest.approx(0.0, abs=1e-7)


def test_shifted_sqrt():
    op = shifted_sqrt_operator(7 / 8, 47 / 64)
    assert eval_sdp_operator(op, [1.0]) == pytest.approx(7 / 8 + math.sqrt(17 / 64), abs=1e-6)
    assert eval_sdp_operator(op, [0.5]) == -INF


# ---------------------------------------------------------------- conic problems


def test_scalar_problem():
    P = ConicProblem()
    u = P.add_scalar()
    P.add_row(scalars={u: 1.0}, rel="<=", rhs=3.0)
    P.set_objective(scalars={u: 1.0})
    res = solve_conic(P)
    assert res.status is Status.OPTIMAL and res.value == pytest.approx(3.0, abs=1e-6)


def test_unbounded_and_infeasible_scalar_problems():
    P = ConicProblem()
    u = P.add_scalar()
    P.set_objective(scalars={u: 1.0})
    assert solve_conic_robust(P).status is Status.UNBOUNDED
    P.add_row(scalars={u: 1.0}, rel="<=", rhs=-1.0)
    P.add_row(scalars={u: -1.0}, rel="<=", rhs=0.0)
    assert solve_conic_robust(P).status is Status.INFEASIBLE


def test_mixed_scalar_and_block():
    # max u  s.t.  u <= X_12, X_11 = 1, X_22 <= 4  ->  u = 2
    P = ConicProblem()
    u = P.add_scalar()
    j = P.add_block(2)
    P.add_row(blocks={j: np.array([[1.0, 0], [0, 0]])}, rel="=", rhs=1.0)
    P.add_row(blocks={j: np.array([[0, 0], [0, 1.0]])}, rel="<=", rhs=4.0)
    P.add_row(scalars={u: 1.0}, blocks={j: np.array([[0, -0.5], [-0.5, 0]])}, rel="<=", rhs=0.0)
    P.set_objective(scalars={u: 1.0})
    res = solve_conic(P)
    assert res.status is Status.OPTIMAL and res.value == pytest.approx(2.0, abs=1e-6)
    X = res.blocks[0]
    assert np.linalg.eigvalsh(X)[0] >= -TOL_PSD
    assert X[0, 0] == pytest.approx(1.0, abs=TOL_FEAS * 10)


def test_non_convergence_is_an_error():
    P = sqrt_operator().problem([4.0])
    with pytest.raises(NumericalFailure):
        solve_conic(P, max_iters=1)


def test_row_validation():
    P = ConicProblem()
    j = P.add_block(2)
    with pytest.raises(ValueError):
        P.add_row(blocks={j: np.eye(3)})
    with pytest.raises(ValueError):
        P.add_row(rel=">=")
    with pytest.raises(ValueError):
        P.add_row(rhs=INF)


def test_symmetrize():
    assert np.array_equal(symmetrize([[1.0, 2.0], [2.0, 1.0]]), [[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        symmetrize([[1.0, 2.0], [0.0, 1.0]])


def test_operator_validation():
    with pytest.raises(ValueError):
        SdpOperator([np.eye(2)], [], [], np.eye(2))
    with pytest.raises(ValueError):
        SdpOperator([], [], [np.eye(3)], np.eye(2))
    with pytest.raises(ValueError):
        eval_sdp_operator(sqrt_operator(), [1.0, 2.0])


# ---------------------------------------------------------------- oracles


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_agrees_with_cvxopt(seed):
    rng = np.random.default_rng(seed)
    op = random_sdp_operator(rng, int(rng.integers(1, 4)), n=int(rng.integers(2, 4)))
    b = rng.uniform(-1, 5, size=op.arity)
    ref = _cvxopt_value(op, b)
    if ref is None:
        return
    ours = eval_sdp_operator(op, b)
    if math.isinf(ref):
        assert ours == ref
    else:
        assert ours == pytest.approx(ref, abs=1e-5 * (1 + abs(ref)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_optimal_blocks_feasible(seed):
    rng = np.random.default_rng(seed)
    op = random_sdp_operator(rng, 2, n=3)
    b = rng.uniform(0.5, 5, size=2)
    P = op.problem(b)
    res = solve_conic_robust(P)
    if res.status is not Status.OPTIMAL:
        return
    X = res.blocks[0]
    assert np.allclose(X, X.T)
    assert np.linalg.eigvalsh(X)[0] >= -1e-7
    for row in P.rows:
        lhs = inner(row.blocks[0], X)
        slack = lhs - row.rhs
        assert (abs(slack) if row.rel == "=" else slack) <= 1e-6 * (1 + abs(row.rhs))
    assert inner(op.C, X) == pytest.approx(res.value, abs=1e-6 * (1 + abs(res.value)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lp_as_sdp_matches_simplex(seed):
    rng = np.random.default_rng(seed)
    k, m = int(rng.integers(1, 4)), int(rng.integers(1, 3))
    A = rng.integers(-3, 4, size=(k, m)).astype(float)
    c = rng.integers(-2, 3, size=m).astype(float)
    b = [float(v) if rng.random() > 0.1 else INF for v in rng.integers(-3, 5, size=k)]
    lp = eval_lp_operator(LpOperator(A, c), b)
    sdp = eval_sdp_operator(lp_as_sdp(A, c), b)
    if math.isinf(lp):
        assert sdp == lp
    else:
        assert abs(sdp - lp) <= 1e-6 * (1 + abs(lp))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_operator_monotone(seed):
    rng = np.random.default_rng(seed)
    op = random_sdp_operator(rng, 2)
    lo, hi = comparable_pair(rng, 2)
    assert eval_sdp_operator(op, lo) <= eval_sdp_operator(op, hi) + 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 1))
def test_operator_order_concave(seed, lam):
    rng = np.random.default_rng(seed)
    op = random_sdp_operator(rng, 2)
    lo, hi = comparable_pair(rng, 2, p_inf=0.0)
    v1, v2 = eval_sdp_operator(op, lo), eval_sdp_operator(op, hi)
    if math.isfinite(v1) and math.isfinite(v2):
        mid = [lam * a + (1 - lam) * b for a, b in zip(lo, hi)]
        assert eval_sdp_operator(op, mid) >= lam * v1 + (1 - lam) * v2 - 1e-6
