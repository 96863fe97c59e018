"""Compare the numba kernels with the numpy fallback.

Each backend runs in its own interpreter because ENGSET_DISABLE_NUMBA is read
at import time.  Compilation is excluded by a warm-up pass.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json, sys, time
import numpy as np
from engset import kernels
from engset.core import EngsetInstance, SolverConfig, eval_f, reciprocal_coefficients
from engset.solvers import fixed_point, newton, solve

repeat = int(sys.argv[1])


def table():
    cfg = SolverConfig()
    for alpha in (0.25, 0.5, 1.0, 2.0):
        for m in range(1, 20):
            inst = EngsetInstance(m, 20, alpha)
            solve(m, 20, alpha, cfg)
            fixed_point(inst, cfg)
            newton(inst, cfg)


def evaluations():
    grid = np.linspace(0.0, 1.0, 101)
    for m in (5, 50, 200):
        inst = EngsetInstance(m, 2 * m + 1, 1.7)
        for p in grid:
            eval_f(inst, float(p))


def coefficients():
    for m in (50, 200, 400):
        kernels.reciprocal_coefficients(m, m + 1, 0.6)


cases = {"table": table, "eval_f grid": evaluations, "coefficients": coefficients}
for fn in cases.values():
    fn()
out = {"numba": kernels.USE_NUMBA}
for name, fn in cases.items():
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best
print(json.dumps(out))
"""


def run(disable, repeat):
    env = dict(os.environ, ENGSET_DISABLE_NUMBA="1" if disable else "0")
    cp = subprocess.run(
        [sys.executable, "-c", WORKLOAD, str(repeat)], capture_output=True, text=True, env=env, check=True
    )
    return json.loads(cp.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    jitted = run(False, args.repeat)
    plain = run(True, args.repeat)
    if not jitted.pop("numba"):
        print("numba is not available; both columns use the numpy path", file=sys.stderr)
    plain.pop("numba")

    print(f"{'workload':<14} {'numba [s]':>10} {'numpy [s]':>10} {'speedup':>8}")
    for name in jitted:
        print(f"{name:<14} {jitted[name]:>10.4f} {plain[name]:>10.4f} {plain[name] / jitted[name]:>7.1f}x")


if __name__ == "__main__":
    main()
