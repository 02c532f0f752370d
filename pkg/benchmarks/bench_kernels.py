#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Runs each hot kernel under both backends (the fallback is selected by
setting XQCORR_DISABLE_NUMBA=1 in a child process) and prints a
side-by-side timing table.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --states 50000 --grid 128
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np


def _best_of(fn, repeat, *args):
    fn(*args)  # warm-up / JIT compile
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run_suite(n_states, grid, n_times, repeat):
    from xqcorr import _kernels
    from xqcorr.ensemble import SamplerConfig, sample_x_arrays
    from xqcorr.states import XStateParams

    results = {}

    arr, _ = sample_x_arrays(SamplerConfig(seed=0, count=n_states))
    results["batch_reports(%d states)" % n_states] = _best_of(
        _kernels.batch_reports, repeat, arr, 1e-10)

    ts = np.linspace(0.0, 50.0, n_times)
    results["pt_values(%d times)" % n_times] = _best_of(
        _kernels.pt_values, repeat, ts, 1.0, 0.01)

    rho = np.ascontiguousarray(
        XStateParams(0.5, 0.1, 0.1, 0.3, 0.35, 0.05).to_matrix().matrix)
    thetas = math.pi * (np.arange(grid) + 0.5) / grid
    phis = 2.0 * math.pi * np.arange(grid) / grid
    results["measurement_scan(%dx%d grid)" % (grid, grid)] = _best_of(
        _kernels.measurement_scan, repeat,
        rho, np.cos(thetas), np.sin(thetas), np.cos(phis), np.sin(phis))

    return _kernels.BACKEND, results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--states", type=int, default=20000)
    parser.add_argument("--grid", type=int, default=128)
    parser.add_argument("--times", type=int, default=1_000_000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", action="store_true",
                        help="emit raw results for the current backend only")
    args = parser.parse_args()

    if args.json:
        backend, results = run_suite(args.states, args.grid, args.times,
                                     args.repeat)
        json.dump({"backend": backend, "results": results}, sys.stdout)
        print()
        return

    child = [sys.executable, os.path.abspath(__file__),
             "--states", str(args.states), "--grid", str(args.grid),
             "--times", str(args.times), "--repeat", str(args.repeat),
             "--json"]
    runs = {}
    for disable in ("0", "1"):
        env = dict(os.environ, XQCORR_DISABLE_NUMBA=disable)
        out = subprocess.run(child, env=env, capture_output=True, text=True,
                             check=True)
        doc = json.loads(out.stdout)
        runs[doc["backend"]] = doc["results"]

    if set(runs) == {"numpy"}:
        print("numba unavailable; fallback timings only")
        for name, t in runs["numpy"].items():
            print("  %-38s %10.3f ms" % (name, 1e3 * t))
        return

    print("%-38s %12s %12s %9s" % ("kernel", "numba [ms]", "numpy [ms]",
                                   "speedup"))
    for name in runs["numba"]:
        tn = runs["numba"][name]
        tf = runs["numpy"][name]
        print("%-38s %12.3f %12.3f %8.1fx" % (name, 1e3 * tn, 1e3 * tf,
                                              tf / tn))


if __name__ == "__main__":
    main()
