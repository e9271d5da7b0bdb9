import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stratsolve import catalog
from stratsolve.core import (
    Affine,
    CaseAtInfinity,
    Const,
    EquationSystem,
    Max,
    NegInf,
    SdpLeaf,
    apply_strategy,
    bottom,
    kleene_step,
    leq,
    residual,
)
from stratsolve.evaluate import (
    GenStats,
    StepBudgetExceeded,
    UnsupportedLeaf,
    build_constraint_system,
    eval_for_cmorcave,
    eval_for_gen,
    eval_for_max_att,
    increasing_variables,
    select_algorithm,
    solve_least,
    step_budget,
    suppresol,
    suppresol_iterate,
    suppresol_partition,
)
from stratsolve.sdpsolve import shifted_sqrt_operator, sqrt_operator

from randgen import random_system

INF = math.inf


def conj(**leaves):
    return EquationSystem(tuple(leaves), {x: Max((l,)) for x, l in leaves.items()})


# ---------------------------------------------------------------- constraint systems


def _rows(cs):
    return [(dict(r.scalars), r.rel, r.rhs) for r in cs.problem.rows]


def test_constraint_system_param_easy():
    E = catalog.param_system()
    cs = build_constraint_system(E, ["x1", "x2"])
    x1, x2 = cs.index["x1"], cs.index["x2"]
    y, w, z = 2, 3, 4
    assert _rows(cs) == [
        ({x1: 1.0, y: -1.0}, "<=", 0.0),  # x1 <= y
        ({y: 1.0}, "<=", 0.0),  # y <= 0
        ({x2: 1.0, z: -1.0}, "<=", 0.0),  # x2 <= z
        ({w: 1.0, x1: -1.0}, "<=", 0.0),  # w <= x1
        ({w: -1.0}, "<=", 0.0),  # 0 <= w
        ({z: 1.0}, "<=", 1.0),  # z <= 1
    ]
    assert cs.maximize("x1") == 0.0 and cs.maximize("x2") == 1.0


def test_constraint_system_frozen_substitution():
    E = catalog.param_system(strict=True)
    cs = build_constraint_system(E, ["x2"], {"x1": 0.0})
    assert cs.maximize("x2") == 1.0
    assert build_constraint_system(E, ["x2"], {"x1": -INF}).maximize("x2") == -INF
    with pytest.raises(KeyError):
        build_constraint_system(E, ["x2"])


def test_constraint_system_sqrt():
    E = conj(x=SdpLeaf(sqrt_operator(), ("x",)))
    cs = build_constraint_system(E, ["x"])
    assert cs.problem.block_dims == [2]
    # x <= X_12, X_11 = 1, X_22 <= x  has sup 1
    assert cs.maximize("x") == pytest.approx(1.0, abs=1e-5)


def test_constraint_system_rejects_case_leaf():
    E = catalog.infinity_case_system()
    with pytest.raises(UnsupportedLeaf):
        build_constraint_system(E, ["x3"], {"x2": 0.0})


# ---------------------------------------------------------------- evaluators


def test_max_att_param_easy_exact():
    assert eval_for_max_att(catalog.param_system(), {"x1": 0.0, "x2": 0.0}) == {"x1": 0.0, "x2": 1.0}


def test_max_att_constant_and_unbounded():
    assert eval_for_max_att(conj(x=Const(5.0)), {"x": 0.0}) == {"x": 5.0}
    assert eval_for_max_att(conj(x=Affine({"x": 1.0})), {"x": 0.0}) == {"x": INF}


def test_gen_param_general():
    stats = GenStats()
    rho = eval_for_gen(catalog.param_system(strict=True), {"x1": 0.0, "x2": 0.0}, stats=stats)
    assert rho["x1"] == pytest.approx(0.0, abs=1e-8) and rho["x2"] == pytest.approx(1.0, abs=1e-8)
    assert stats.rounds == 2
    assert stats.frozen_sets == [frozenset({"x1"}), frozenset({"x1"})]


def test_gen_agrees_with_max_att_on_non_strict():
    rho0 = {"x1": 0.0, "x2": 0.0}
    E = catalog.param_system()
    assert eval_for_gen(E, rho0) == eval_for_max_att(E, rho0)


def test_gen_at_solution_freezes_everything():
    stats = GenStats()
    rho = {"x1": 0.0, "x2": 1.0}
    assert eval_for_gen(catalog.param_system(strict=True), rho, stats=stats) == rho
    assert stats.frozen_sets[-1] == frozenset({"x1", "x2"})


def test_gen_frozen_sets_shrink():
    # x1 grows only once x2 has grown, so x1 is frozen first and released later
    E = conj(x1=Affine({"x2": 1.0}, -1.0), x2=Const(3.0))
    stats = GenStats()
    rho = eval_for_gen(E, {"x1": -1.0, "x2": 0.0}, stats=stats)
    assert rho == {"x1": 2.0, "x2": 3.0}
    sets = stats.frozen_sets
    assert all(b <= a for a, b in zip(sets, sets[1:]))


def test_cmorcave_strict_example():
    E = catalog.param_system(strict=True)
    rho = {"x1": 0.0, "x2": 0.0}
    assert increasing_variables(E, rho, 1e-9) == {"x2"}
    assert eval_for_cmorcave(E, rho) == {"x1": 0.0, "x2": 1.0}


def test_cmorcave_shifted_sqrt():
    E = conj(x=SdpLeaf(shifted_sqrt_operator(7 / 8, 47 / 64), ("x",)))
    assert eval_for_cmorcave(E, {"x": 1.0}, 1e-5)["x"] == pytest.approx(2.0, abs=1e-5)


def test_cmorcave_at_solution():
    rho = {"x1": 0.0, "x2": 1.0}
    assert eval_for_cmorcave(catalog.param_system(strict=True), rho) == rho


# ---------------------------------------------------------------- infinities


def test_partition_finite():
    part = suppresol_partition(catalog.infinity_case_system(), {"x1": 0.0, "x2": 0.0, "x3": 0.0})
    assert part.neg == frozenset() and part.pos == frozenset()
    assert part.rest == ("x1", "x2", "x3")


def test_partition_with_infinity():
    part = suppresol_partition(catalog.infinity_case_system(), {"x1": 1.0, "x2": INF, "x3": 0.0})
    assert part.pos == frozenset({"x2"})


def test_partition_all_neginf():
    E = catalog.two_var_system()
    Es = apply_strategy(E, {"x1": 0, "x2": 0})
    assert suppresol_partition(Es, bottom(Es)).neg == frozenset(E.variables)


def test_suppresol_chain():
    E = catalog.infinity_case_system()
    rho0 = {"x1": 0.0, "x2": 0.0, "x3": 0.0}
    rho1 = suppresol(E, rho0)
    rho2 = suppresol(E, rho1)
    rho3 = suppresol(E, rho2)
    assert rho1 == {"x1": 1.0, "x2": INF, "x3": 0.0}
    assert rho2 == rho3 == {"x1": 1.0, "x2": INF, "x3": 1.0}
    assert suppresol_iterate(E, rho0) == rho3


def test_suppresol_iterate_cmorcave_one_round():
    E = catalog.param_system()
    rho = {"x1": 0.0, "x2": 0.0}
    assert suppresol_iterate(E, rho) == suppresol(E, rho)


def test_gen_handles_case_leaf():
    E = catalog.infinity_case_system()
    assert eval_for_gen(E, {"x1": 0.0, "x2": 0.0, "x3": 0.0}) == {"x1": 1.0, "x2": INF, "x3": 1.0}


# ---------------------------------------------------------------- outer loop


def test_solve_sqrt_system_trace():
    res = solve_least(catalog.sqrt_system(), trace=True)
    assert res.values["x"] == pytest.approx(2.0, abs=1e-5)
    assert res.steps == 3
    vals = [e.values["x"] for e in res.trace]
    assert vals[0] == -INF
    assert vals[1:] == pytest.approx([0.5, 1.0, 2.0], abs=1e-5)
    assert [e.strategy["x"] for e in res.trace] == [0, 1, 2, 3]


def test_solve_two_var_trace():
    res = solve_least(catalog.two_var_system(), trace=True)
    assert res.values["x1"] == pytest.approx(0.0, abs=1e-5)
    assert res.values["x2"] == pytest.approx(0.0, abs=1e-5)
    assert [e.strategy for e in res.trace] == [
        {"x1": 0, "x2": 0}, {"x1": 0, "x2": 1}, {"x1": 1, "x2": 1}, {"x1": 1, "x2": 2},
    ]


def test_solve_neginf_only():
    E = EquationSystem(("x",), {"x": Max((NegInf(),))})
    res = solve_least(E)
    assert res.values == {"x": -INF} and res.steps == 0


def test_solve_requires_standard_form():
    with pytest.raises(ValueError, match="standard form"):
        solve_least(catalog.param_system())


def test_select_algorithm():
    from stratsolve.core import standard_form

    assert select_algorithm(standard_form(catalog.param_system())) == "maxatt"
    assert select_algorithm(standard_form(catalog.param_system(strict=True))) == "cmorcave"
    assert select_algorithm(catalog.sqrt_system()) == "cmorcave"
    assert select_algorithm(standard_form(catalog.infinity_case_system())) == "gen"


def test_step_budget_value():
    assert step_budget(catalog.sqrt_system()) == 4
    assert step_budget(catalog.two_var_system()) == 2 * 6


def test_step_budget_enforced(monkeypatch):
    import stratsolve.evaluate as ev

    monkeypatch.setattr(ev, "step_budget", lambda E: 1)
    with pytest.raises(StepBudgetExceeded):
        ev.solve_least(catalog.sqrt_system())


def test_unsupported_leaf_for_max_att():
    from stratsolve.core import standard_form

    with pytest.raises(UnsupportedLeaf):
        solve_least(standard_form(catalog.infinity_case_system()), algorithm="maxatt")


def test_gen_solves_infinity_system():
    from stratsolve.core import standard_form

    E = standard_form(EquationSystem(("x1", "x2", "x3"), {
        "x1": Max((Const(1.0),)),
        "x2": Max((Const(0.0), Affine({"x1": 1.0, "x2": 1.0}))),
        "x3": Max((CaseAtInfinity("x2", 0.0, 1.0),)),
    }))
    res = solve_least(E, algorithm="gen")
    assert res.values == {"x1": 1.0, "x2": INF, "x3": 1.0}


# ---------------------------------------------------------------- properties


def _kleene_below(E, rho, n=30):
    cur = bottom(E)
    for _ in range(n):
        cur = kleene_step(E, cur)
    return leq(cur, rho, tol=1e-5)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_algorithms_agree_on_lp_systems(seed):
    rng = np.random.default_rng(seed)
    E = random_system(rng)
    results = [solve_least(E, algorithm=a) for a in ("maxatt", "gen", "cmorcave")]
    base = results[0].values
    for res in results:
        assert res.residual <= 1e-6
        assert res.steps <= res.budget
        assert leq(base, res.values, 1e-6) and leq(res.values, base, 1e-6)
    assert _kleene_below(E, base)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_increasing(seed):
    rng = np.random.default_rng(seed)
    E = random_system(rng, kinds=("const", "affine", "min", "lp", "sdp"))
    res = solve_least(E, trace=True)
    tol = 1e-5
    for a, b in zip(res.trace, res.trace[1:]):
        assert leq(a.values, b.values, tol)
        # strictly greater somewhere while not yet a solution
        assert any(b.values[x] > a.values[x] for x in E.variables)
    assert res.residual <= 1e-5
    assert _kleene_below(E, res.values)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gen_and_cmorcave_agree_on_strict_systems(seed):
    rng = np.random.default_rng(seed)
    E = random_system(rng, kinds=("const", "affine", "min", "strict_lp"))
    gen, cm = (solve_least(E, algorithm=a) for a in ("gen", "cmorcave"))
    assert gen.residual <= 1e-6 and cm.residual <= 1e-6
    assert leq(gen.values, cm.values, 1e-6) and leq(cm.values, gen.values, 1e-6)
    assert _kleene_below(E, gen.values)
