"""Analyze the harmonic oscillator loop and check the bounds against simulated runs."""
import argparse
import time

import numpy as np

from stratsolve.relax import analyze, concrete_step, harmonic_oscillator, template_value


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=200, help="random starts to simulate")
    ap.add_argument("--steps", type=int, default=1000, help="loop iterations per run")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    G, P = harmonic_oscillator()
    t0 = time.perf_counter()
    res = analyze(G, P, trace=True)
    dt = time.perf_counter() - t0
    bounds = res.bounds["st"]
    print(f"{res.steps} improvement steps over {res.strategies} strategies, "
          f"residual {res.residual:.1e}, {dt:.2f} s")
    for i, (p, v) in enumerate(zip(P, bounds)):
        print(f"  p{i + 1}  A={p.A.tolist()}  b={p.b.tolist()}  bound {v:.6f}")

    # empirical maxima of each template along concrete runs from the initial box
    rng = np.random.default_rng(args.seed)
    stmt = G.edges[0].stmt
    seen = np.full(len(P), -np.inf)
    for _ in range(args.runs):
        x = rng.uniform(0, 1, size=2)
        for _ in range(args.steps):
            seen = np.maximum(seen, [template_value(p, x) for p in P])
            x = concrete_step(stmt, x)
    print("observed maxima:", np.round(seen, 6).tolist())
    print("sound:", bool(np.all(seen <= np.array(bounds) + 1e-6)))


if __name__ == "__main__":
    main()
