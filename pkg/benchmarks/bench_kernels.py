"""Compare the compiled and pure-numpy backends of the causal Toeplitz kernel.

Usage::

    python benchmarks/bench_kernels.py [--sizes 400 1600 6400] [--repeat 5]

Reports the best wall time per call for ``causal_dot`` at each size and
for one end-to-end Picard solve, plus the max difference between the
backends' outputs.
"""

from __future__ import annotations

import argparse
import time
import warnings

import numpy as np

from distorder import kernels
from distorder.forcing import TimeOnlyForcing
from distorder.grid import make_grid
from distorder.solver import ProblemSpec, picard_solve
from distorder.weights import AtomicWeight


def best_time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_causal_dot(sizes, repeat: int) -> None:
    rng = np.random.default_rng(0)
    print(f"{'n':>7} " + " ".join(f"{b:>12}" for b in kernels.available_backends()) + "   max|diff|")
    for n in sizes:
        c = rng.standard_normal(n)
        y = rng.standard_normal(n)
        times, outs = [], []
        for backend in kernels.available_backends():
            kernels.set_backend(backend)
            outs.append(kernels.causal_dot(c, y))
            times.append(best_time(lambda: kernels.causal_dot(c, y), repeat))
        diff = max(float(np.max(np.abs(o - outs[0]))) for o in outs)
        print(f"{n:>7} " + " ".join(f"{t * 1e3:>10.3f}ms" for t in times) + f"   {diff:.2e}")


def bench_solve(n_steps: int, repeat: int) -> None:
    problem = ProblemSpec(
        AtomicWeight(((1.0, 1.5),)),
        AtomicWeight(((1.0, 0.5), (1.0, 0.0))),
        TimeOnlyForcing("const", 1.0),
        0.0,
        0.0,
        0.5,
        1.0,
    )
    grid = make_grid(0.5, n_steps)
    print(f"\npicard_solve, N={n_steps}")
    ys = []
    for backend in kernels.available_backends():
        kernels.set_backend(backend)

        def run():
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return picard_solve(problem, grid, tol=1e-10)

        ys.append(run().y.values)
        print(f"  {backend:>9}: {best_time(run, repeat) * 1e3:9.2f} ms")
    print(f"  max|y diff| across backends: {max(float(np.max(np.abs(y - ys[0]))) for y in ys):.2e}")


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[400, 1600, 6400])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--solve-n", type=int, default=800)
    args = parser.parse_args(argv)
    original = kernels.get_backend()
    try:
        bench_causal_dot(args.sizes, args.repeat)
        bench_solve(args.solve_n, max(1, args.repeat // 2))
    finally:
        kernels.set_backend(original)


if __name__ == "__main__":
    main()
