"""Benchmark the window-sweep kernel: numba build vs pure-numpy fallback.

Run with the default environment to time both paths (the numba build is
compiled on first call, so a warmup pass runs outside the timer):

    python3 benchmarks/bench_kernel.py

Set QUANTSCAN_NO_NUMBA=1 to confirm the fallback is the one in use.
"""

import argparse
import statistics
import time

import numpy as np

from quantscan import kernels
from quantscan.solver import _SWEEP_WINDOW, _encode, parse_formula

# misses are the worst case: the whole window must be swept
WORKLOADS = [
    ("hit early", "2*n >= 64 && n < 64"),
    ("hit mid-window", "n >= 40000"),
    ("miss (full sweep)", "n >= 1099511627776"),
    ("miss, 3 conjuncts", "n >= 1099511627776 && 2*n >= 2 && n + 1 > 0"),
]


def _time(impl, columns, repeats):
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        impl(*columns, np.uint64(0), _SWEEP_WINDOW)
        samples.append(time.perf_counter() - start)
    return min(samples), statistics.median(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    impls = [("numpy", kernels._first_sat_numpy)]
    if kernels.USING_NUMBA:
        impls.append(("numba", kernels._impl))
    else:
        print("numba path not active (QUANTSCAN_NO_NUMBA set or numba missing)")

    print(f"window: {_SWEEP_WINDOW} values, repeats: {args.repeats}")
    print(f"{'workload':<20} {'impl':<6} {'best':>10} {'median':>10}")
    for label, text in WORKLOADS:
        columns = _encode(parse_formula(text))
        for name, impl in impls:
            impl(*columns, np.uint64(0), _SWEEP_WINDOW)  # warmup / JIT compile
            best, median = _time(impl, columns, args.repeats)
            print(f"{label:<20} {name:<6} {best * 1e6:>8.1f}us {median * 1e6:>8.1f}us")


if __name__ == "__main__":
    main()
