"""Compare the compiled and pure-Python pivot kernels.

Times raw pivots on random dense tableaus and full LP relaxations of
desk-scale scenarios, once per available backend.

    python benchmarks/bench_pivot.py --repeat 5
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from vodmlg import _kernels
from vodmlg.instances import desk_scale_instance
from vodmlg.synthesis import solve_relaxation


def bench_raw(name: str, m: int, n: int, pivots: int, density: float, seed: int) -> float:
    rng = np.random.default_rng(seed)
    T = rng.normal(size=(m, n))
    T[rng.random((m, n)) > density] = 0.0
    d = rng.normal(size=n)
    kernel = _kernels.BACKENDS[name]
    start = time.perf_counter()
    for k in range(pivots):
        r, j = k % m, (7 * k) % n
        if abs(T[r, j]) < 1e-3:
            T[r, j] = 1.0
        kernel(T, d, r, j)
    return time.perf_counter() - start


def bench_lp(name: str, seed: int) -> tuple[float, int, float]:
    scn = desk_scale_instance(seed)
    _kernels.use_backend(name)
    start = time.perf_counter()
    _, sol = solve_relaxation(scn.graph(), scn.commodities())
    return time.perf_counter() - start, sol.iterations, sol.objective


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--rows", type=int, default=400)
    parser.add_argument("--cols", type=int, default=2000)
    parser.add_argument("--pivots", type=int, default=300)
    parser.add_argument("--density", type=float, default=0.05)
    parser.add_argument("--seeds", type=int, default=3, help="desk-scale scenarios to solve")
    args = parser.parse_args()

    backends = sorted(_kernels.BACKENDS)
    default = _kernels.backend
    print(f"backends: {', '.join(backends)} (default {default})")

    print(f"\nraw pivots: {args.pivots} on {args.rows}x{args.cols}, density {args.density}")
    for name in backends:
        times = [bench_raw(name, args.rows, args.cols, args.pivots, args.density, s) for s in range(args.repeat)]
        print(f"  {name:<8} median {statistics.median(times) * 1e3:8.1f} ms   ({1e6 * statistics.median(times) / args.pivots:.1f} us/pivot)")

    print(f"\nLP relaxation, desk-scale seeds 0..{args.seeds - 1}")
    try:
        for name in backends:
            rows = [bench_lp(name, s) for s in range(args.seeds) for _ in range(args.repeat)]
            total = statistics.median(t for t, _, _ in rows)
            iters = rows[0][1]
            print(f"  {name:<8} median {total:6.3f} s   iterations (seed 0) {iters}")
    finally:
        _kernels.use_backend(default)


if __name__ == "__main__":
    main()
