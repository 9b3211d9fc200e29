#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot stages of the exact error computation (per-symbol row
tables, then the sweep over source types) on a 2x2 and a 3x3 distribution
over a range of blocklengths, and prints the speedup of the compiled
extension where it is available.

Usage: python benchmarks/bench_backends.py [--repeat R]
"""

import argparse
import time
from fractions import Fraction

import numpy as np

from coordbounds import _pykernels, build_distribution
from coordbounds.types import joint_cell_bounds, log2_factorials

try:
    from coordbounds import _ckernels
except ImportError:
    _ckernels = None


def binary_example():
    third = Fraction(1, 3)
    return build_distribution(
        [0, 1], [0, 1], [((0, 0), third), ((0, 1), third), ((1, 0), third)]
    )


def ternary_example():
    entries = [((u, v), Fraction(1, 12)) for u in range(3) for v in range(3) if (u, v) != (2, 2)]
    entries.append(((2, 2), Fraction(1, 12) + Fraction(1, 4)))
    return build_distribution([0, 1, 2], [0, 1, 2], entries)


def time_stages(module, dist, n, delta, repeat):
    """Best-of-repeat times for the row tables and the type sweep, in seconds."""
    lo, hi = joint_cell_bounds(n, dist, delta)
    lgfact = log2_factorials(n)
    log2_pv = np.array(
        [float(np.log2(float(p))) if p > 0 else -np.inf for p in dist.p_v_fractions]
    )
    log2_pu = np.array([float(np.log2(float(dist.p_u_fractions[i]))) for i in dist.support_u])

    best_rows = best_sweep = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        s_tables = np.vstack(
            [module.row_logmass_table(n, lo[i], hi[i], log2_pv, lgfact) for i in dist.support_u]
        )
        t1 = time.perf_counter()
        module.type_sweep(n, log2_pu, s_tables, lgfact)
        t2 = time.perf_counter()
        best_rows = min(best_rows, t1 - t0)
        best_sweep = min(best_sweep, t2 - t1)
    return best_rows, best_sweep


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3, help="best-of-R timing")
    args = parser.parse_args()

    modules = [_pykernels] + ([_ckernels] if _ckernels is not None else [])
    if _ckernels is None:
        print("compiled backend unavailable; timing the pure backend only\n")

    cases = [
        ("2x2", binary_example(), [(500, Fraction(1, 10)), (2000, Fraction(1, 10)), (5000, Fraction(1, 20))]),
        ("3x3", ternary_example(), [(200, Fraction(1, 10)), (400, Fraction(1, 10)), (800, Fraction(1, 20))]),
    ]

    header = f"{'case':>6} {'n':>6} {'delta':>8} {'stage':>11}"
    for module in modules:
        header += f"{module.backend_name:>13}"
    if len(modules) == 2:
        header += f"{'speedup':>10}"
    print(header)

    for label, dist, grid in cases:
        for n, delta in grid:
            timings = {module: time_stages(module, dist, n, delta, args.repeat) for module in modules}
            for stage, idx in (("row tables", 0), ("type sweep", 1)):
                line = f"{label:>6} {n:>6} {float(delta):>8.4f} {stage:>11}"
                for module in modules:
                    line += f"{timings[module][idx] * 1e3:>11.2f}ms"
                if len(modules) == 2 and timings[modules[1]][idx] > 0:
                    ratio = timings[modules[0]][idx] / timings[modules[1]][idx]
                    line += f"{ratio:>9.1f}x"
                print(line)


if __name__ == "__main__":
    main()
