"""Regenerate fixtures/*.json from the reference systems in stratsolve.catalog."""
import argparse
import json
import pathlib

from stratsolve import catalog
from stratsolve.formats import dump_program, dump_system
from stratsolve.relax import Assign, Edge, Guard, Program, QuadraticTemplate, harmonic_oscillator


def documents():
    yield "sqrt_system.json", dump_system(catalog.sqrt_system())
    yield "two_var_system.json", dump_system(catalog.two_var_system())
    yield "param_easy.json", dump_system(catalog.param_system(strict=False))
    yield "param_strict.json", dump_system(catalog.param_system(strict=True))
    yield "infinity_case.json", dump_system(catalog.infinity_case_system())
    yield "oscillator.json", dump_program(*harmonic_oscillator())
    # one control point, no edges: bounds are the initial bounds
    x1 = QuadraticTemplate.linear([1.0, 0.0])
    x2 = QuadraticTemplate.linear([0.0, 1.0])
    yield "no_edges.json", dump_program(Program(2, ["st"], "st", [], init_bounds=[3.0, "inf"]), [x1, x2])
    # x in [-1, 1], loop x := x / 2 guarded by x^2 <= 1, then exit
    half = Assign([[0.5]], [0.0])
    unit = Guard([[1.0]], [0.0], 1.0)
    loop = Program(1, ["head", "body"], "head",
                   [Edge("head", unit, "body"), Edge("body", half, "head")],
                   init_box=[(-1.0, 1.0)])
    yield "halving_loop.json", dump_program(loop, [QuadraticTemplate.linear([1.0]),
                                                   QuadraticTemplate.linear([-1.0]),
                                                   QuadraticTemplate([[1.0]], [0.0])])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "fixtures"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(exist_ok=True)
    for name, doc in documents():
        (out / name).write_text(json.dumps(doc, indent=1) + "\n")
        print(out / name)


if __name__ == "__main__":
    main()
