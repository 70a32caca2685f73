#!/usr/bin/env python3
"""Time the compiled backend against the pure-numpy fallback.

Each backend runs in its own interpreter so the INAR_NUMBA switch is honored
at import time. The compiled numbers exclude JIT compilation (one warmup call
per kernel before the clock starts).
"""

import json
import os
import subprocess
import sys

CHILD = r"""
import json
import time

import numpy as np

import inar

params = inar.ModelParams(nu=100.0, kernel=inar.geometric_kernel(0.25))

def clock(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best

# warmup: compile (or no-op) every kernel once
inar.poisson_sample(150.0, inar.RngStream(0), size=100)
path = inar.simulate_path(params, 1000, inar.RngStream(0))
theta = inar.solve_cls(inar.build_design(path, 10))
inar.sandwich_covariance(path, theta)

out = {"backend": inar.backend_name()}
out["poisson_1e6"] = clock(
    lambda: inar.poisson_sample(150.0, inar.RngStream(1), size=1_000_000)
)
out["simulate_T2e5"] = clock(
    lambda: inar.simulate_path(params, 200_000, inar.RngStream(2))
)
long_path = inar.simulate_path(params, 200_000, inar.RngStream(3))
out["design_T2e5_p10"] = clock(lambda: inar.build_design(long_path, 10))
cfg = inar.McConfig(params=params, T=500, p=10, n_experiments=200, base_seed=4)
out["mc_200x500"] = clock(lambda: inar.run_experiment(cfg, threads=4), repeat=2)
print(json.dumps(out))
"""


def run_child(flag):
    env = os.environ.copy()
    env["INAR_NUMBA"] = flag
    proc = subprocess.run(
        [sys.executable, "-c", CHILD], capture_output=True, text=True, env=env
    )
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(1)
    return json.loads(proc.stdout)


def main():
    rows = [run_child("1"), run_child("0")]
    keys = ["poisson_1e6", "simulate_T2e5", "design_T2e5_p10", "mc_200x500"]
    width = max(len(k) for k in keys)
    print(f"{'benchmark':<{width}}  {'numba':>10}  {'python':>10}  {'speedup':>8}")
    for k in keys:
        a, b = rows[0][k], rows[1][k]
        print(f"{k:<{width}}  {a * 1e3:>8.1f}ms  {b * 1e3:>8.1f}ms  {b / a:>7.1f}x")


if __name__ == "__main__":
    main()
