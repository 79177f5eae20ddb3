"""Timing comparison of the compiled sampling kernels against the pure
Python reference. Both backends draw identical samples from identical
seeds; this script only measures the speed gap.

Run as: python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from dpplab import BACKEND, derive_substream
from dpplab._kernels import project_sample, wilson_parents
from dpplab.dpp import GroundSpace, ProjectionFrame
from dpplab.numerics import orthonormalize


def _time(label, force, reps, work):
    best = np.inf
    for _ in range(reps):
        started = time.perf_counter()
        work(force)
        best = min(best, time.perf_counter() - started)
    print(f"  {label:>10}: {best * 1000:10.2f} ms")
    return best


def bench_wilson(n, trees, reps):
    print(f"wilson_parents: n={n}, {trees} trees")

    def work(force):
        rng = derive_substream(1, 0)
        for _ in range(trees):
            wilson_parents(n, rng, force=force)

    pure = _time("pure", "pure", reps, work)
    if BACKEND == "compiled":
        fast = _time("compiled", "compiled", reps, work)
        print(f"  {'speedup':>10}: {pure / fast:10.1f} x")


def bench_project(npoints, rank, draws, reps):
    print(f"project_sample: {npoints} points, rank {rank}, {draws} draws")
    rng0 = np.random.default_rng(2)
    space = GroundSpace.counting(list(range(npoints)))
    rows = orthonormalize(
        rng0.normal(size=(rank, npoints)), space.inner_product()
    )
    scaled = ProjectionFrame(space, rows).scaled_rows()

    def work(force):
        rng = derive_substream(1, 1)
        for _ in range(draws):
            project_sample(scaled.copy(), rng, force=force)

    pure = _time("pure", "pure", reps, work)
    if BACKEND == "compiled":
        fast = _time("compiled", "compiled", reps, work)
        print(f"  {'speedup':>10}: {pure / fast:10.1f} x")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()
    print(f"active backend: {BACKEND}")
    if BACKEND != "compiled":
        print("compiled kernels unavailable; timing the pure backend only")
    reps = 1 if args.quick else 3
    scale = 10 if args.quick else 1
    bench_wilson(200, 400 // scale, reps)
    bench_wilson(2000, 40 // scale, reps)
    bench_project(32, 4, 2000 // scale, reps)
    bench_project(64, 8, 500 // scale, reps)


if __name__ == "__main__":
    main()
