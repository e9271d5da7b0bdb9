"""Solve the small reference systems and print their improvement traces."""
import argparse

from stratsolve import catalog
from stratsolve.core import standard_form
from stratsolve.evaluate import GenStats, eval_for_gen, eval_for_max_att, solve_least, suppresol
from stratsolve.extreal import fmt


def show_trace(name: str, E) -> None:
    res = solve_least(E, trace=True)
    print(f"{name}: {res.steps} steps ({res.algorithm}), budget {res.budget}")
    for k, entry in enumerate(res.trace):
        vals = ", ".join(f"{x}={fmt(v)}" for x, v in entry.values.items())
        print(f"  sigma{k} {entry.strategy}  {vals}")


def main() -> None:
    argparse.ArgumentParser(description=__doc__).parse_args()
    show_trace("sqrt system", catalog.sqrt_system())
    show_trace("two-variable system", catalog.two_var_system())

    rho = {"x1": 0.0, "x2": 0.0}
    print("maxatt on non-strict system:", eval_for_max_att(catalog.param_system(), rho))
    stats = GenStats()
    print("gen on strict system:", eval_for_gen(catalog.param_system(strict=True), rho, stats=stats),
          f"({stats.rounds} rounds, frozen {[sorted(s) for s in stats.frozen_sets]})")

    E = catalog.infinity_case_system()
    cur = {x: 0.0 for x in E.variables}
    for k in range(1, 4):
        cur = suppresol(E, cur)
        print(f"suppresol^{k}:", {x: fmt(v) for x, v in cur.items()})
    show_trace("infinity system", standard_form(E))


if __name__ == "__main__":
    main()
