"""Benchmark the compiled stencil kernels against the NumPy fallback.

Runs each kernel on representative box and cylinder grids, checks that
the two backends agree to near machine precision, and prints best-of-N
timings with the speedup.  Usage:

    python3 benchmarks/bench_kernels.py [--nodes 96] [--repeats 20]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from heisenheat._kernels import get_impl


def best_time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_case(name, call, args_for, shape, repeats):
    rng = np.random.default_rng(7)
    u = rng.standard_normal(shape)
    out_a = np.empty_like(u)
    out_b = np.empty_like(u)
    compiled = get_impl("compiled")
    fallback = get_impl("numpy")
    args = args_for(u)

    getattr(compiled, call)(*args, out_a)
    getattr(fallback, call)(*args, out_b)
    scale = float(np.max(np.abs(out_a))) + 1e-300
    gap = float(np.max(np.abs(out_a - out_b))) / scale

    t_c = best_time(lambda: getattr(compiled, call)(*args, out_a), repeats)
    t_f = best_time(lambda: getattr(fallback, call)(*args, out_b), repeats)
    print(
        f"{name:<28} {t_c * 1e3:9.3f} ms {t_f * 1e3:9.3f} ms "
        f"{t_f / t_c:7.2f}x   rel gap {gap:.2e}"
    )
    return gap


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=96, help="box nodes per axis")
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    m = args.nodes
    hx = hy = ht = 12.0 / (m - 1)
    x = np.linspace(-6.0, 6.0, m)
    y = x.copy()

    nr, ntau = 4 * m, 8 * m
    dr = 20.0 / nr
    r = (np.arange(nr) + 0.5) * dr
    dtau = 2.0 * 400.0 / ntau

    print(f"{'kernel':<28} {'compiled':>12} {'numpy':>12} {'speedup':>8}")
    gaps = [
        run_case(
            f"box_direct {m}^3",
            "box_direct",
            lambda u: (u, x, y, hx, hy, ht, 1.0),
            (m, m, m),
            args.repeats,
        ),
        run_case(
            f"box_composed {m}^3",
            "box_composed",
            lambda u: (u, x, y, hx, hy, ht),
            (m, m, m),
            args.repeats,
        ),
        run_case(
            f"cyl_centered {nr}x{ntau}",
            "cyl_centered",
            lambda u: (u, r, dr, dtau, 1.0),
            (nr, ntau),
            args.repeats,
        ),
        run_case(
            f"cyl_flux {nr}x{ntau}",
            "cyl_flux",
            lambda u: (u, r, dr, dtau, 1.0),
            (nr, ntau),
            args.repeats,
        ),
    ]
    worst = max(gaps)
    print(f"worst backend disagreement: {worst:.2e}")
    return 0 if worst < 1e-12 else 1


if __name__ == "__main__":
    raise SystemExit(main())
