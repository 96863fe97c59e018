"""Acceptance criteria.  Each test records one PASS/FAIL line, shown in the
terminal summary under "acceptance criteria"."""

import csv
import io
import math
import time

import numpy as np
import pytest

from engset import kernels
from engset.cli import main as cli_main
from engset.core import (
    EngsetInstance,
    SolverConfig,
    eval_f,
    eval_f_prime,
    reciprocal_coefficients,
)
from engset.oracle import direct_f, reference_solution
from engset.solvers import Method, bisect, fixed_point, iteration_bound, newton, solve
from engset.turan import TuranInstance, ratio_monotone_check, turan_gap

TOL = 2.0**-24
SEED = 20240611


def random_instances(rng, count, max_alpha, n_max=60, half_loaded=False):
    out = []
    while len(out) < count:
        n = int(rng.integers(2, n_max + 1))
        m_hi = n // 2 if half_loaded else n - 1
        m = int(rng.integers(1, m_hi + 1))
        alpha = float(rng.uniform(0.01, max_alpha))
        out.append(EngsetInstance(m, n, alpha))
    return out


def table1_runs():
    out = []
    cfg = SolverConfig()
    for alpha in (0.25, 0.5, 1.0, 2.0):
        for m in range(1, 20):
            inst = EngsetInstance(m, 20, alpha)
            out.append((alpha, m, solve(m, 20, alpha, cfg, Method.AUTO), fixed_point(inst, cfg), newton(inst, cfg)))
    return out


def test_1_comparison_table(table1, acceptance_report):
    if kernels.USE_NUMBA:
        table1_runs()  # compile before timing
    start = time.perf_counter()
    runs = table1_runs()
    elapsed = time.perf_counter() - start

    expected = {(row["alpha"], row["m"]): row for row in table1}
    bad_p, bad_newton, bad_fp, fail_rows = [], [], [], 0
    for alpha, m, best, fp, nt in runs:
        row = expected[(alpha, m)]
        if f"{best.p_star:.3e}" != row["p_star"]:
            bad_p.append((alpha, m, best.p_star, row["p_star"]))
        if not nt.converged or abs(nt.iterations - row["newton_iters"]) > 1:
            bad_newton.append((alpha, m, nt.iterations, row["newton_iters"]))
        if row["fixed_point_iters"] is None:
            fail_rows += 1
            if fp.converged:
                bad_fp.append((alpha, m, fp.iterations, "FAIL"))
        elif not fp.converged or abs(fp.iterations - row["fixed_point_iters"]) > 1:
            bad_fp.append((alpha, m, fp.iterations, row["fixed_point_iters"]))

    timed = elapsed < 1.0 or not kernels.USE_NUMBA
    ok = not bad_p and not bad_newton and not bad_fp and timed
    acceptance_report(
        "1 N=20 comparison table reproduction",
        ok,
        f"76 rows, {fail_rows} FAIL rows, P* mismatches={len(bad_p)}, Newton={len(bad_newton)}, "
        f"fixed point={len(bad_fp)}, {elapsed:.3f}s",
    )
    assert not bad_p, bad_p
    assert not bad_newton, bad_newton
    assert not bad_fp, bad_fp
    assert fail_rows == 16
    if kernels.USE_NUMBA:
        assert elapsed < 1.0


def test_2_bisection_determinism(acceptance_report):
    rng = np.random.default_rng(SEED)
    counts = [bisect(inst, SolverConfig(tol=TOL)).iterations for inst in random_instances(rng, 50, 5.0)]
    ok = set(counts) == {24}
    acceptance_report("2 bisection determinism", ok, f"iteration counts {sorted(set(counts))}")
    assert ok


def test_3_oracle_equivalence(acceptance_report):
    worst = 0.0
    points = 0
    grid = [k / 10 for k in range(11)]
    for n in range(2, 31):
        for m in range(1, n):
            for alpha in (0.1, 0.25, 0.5, 1.0, 1.5, 2.0):
                inst = EngsetInstance(m, n, alpha)
                for p in grid:
                    if p == 1.0 - 1.0 / alpha:
                        continue
                    ref = direct_f(inst, p)
                    worst = max(worst, abs(eval_f(inst, p) - ref) / ref)
                    points += 1
    ok = worst <= 1e-12
    acceptance_report("3 oracle equivalence", ok, f"{points} points, max relative error {worst:.2e}")
    assert ok


def test_4_residuals(acceptance_report):
    rng = np.random.default_rng(SEED + 4)
    instances = [EngsetInstance(m, 20, a) for a in (0.25, 0.5, 1.0, 2.0) for m in range(1, 20)]
    instances += random_instances(rng, 200, 5.0)
    worst, solves = 0.0, 0
    for inst in instances:
        for res in (solve(inst.servers, inst.sources, inst.alpha), newton(inst)):
            if res.converged:
                solves += 1
                worst = max(worst, abs(eval_f(inst, res.p_star) - res.p_star))
    ok = worst <= 1e-9
    # bisection and fixed point stop on an O(tol) bracket, reported for information
    loose = max(
        abs(r.residual)
        for inst in instances
        for r in (bisect(inst), fixed_point(inst))
        if r.converged
    )
    acceptance_report(
        "4 residual of converged solves",
        ok,
        f"{solves} solves, max |f(P*)-P*| {worst:.2e} (bisection/fixed point at tol=2^-24: {loose:.2e})",
    )
    assert ok


def test_5_convergence_guarantees(acceptance_report):
    rng = np.random.default_rng(SEED + 5)
    newton_failures = [
        (inst, p0)
        for inst in random_instances(rng, 200, 1.0)
        for p0 in (0.0, 0.5, 1.0)
        if not newton(inst, SolverConfig(p0=p0)).converged
    ]
    fp_failures = [
        inst for inst in random_instances(rng, 200, 1.0, half_loaded=True) if not fixed_point(inst).converged
    ]

    bound_checks, bound_violations = 0, []
    for inst in random_instances(rng, 60, 1.0, n_max=30):
        p_ref = reference_solution(inst)
        for k in (0, 1, 2):
            for eps in (2.0**-24, 1e-6, 1e-3):
                bound = iteration_bound(inst, k, eps)
                if bound is None:
                    continue
                p, n = 0.0, 0
                while abs(p - p_ref) > eps and n <= bound:
                    p = eval_f(inst, p)
                    n += 1
                bound_checks += 1
                if n > bound:
                    bound_violations.append((inst, k, eps, n, bound))

    ok = not newton_failures and not fp_failures and not bound_violations and bound_checks > 0
    acceptance_report(
        "5 convergence guarantees",
        ok,
        f"Newton failures {len(newton_failures)}/600, fixed point failures {len(fp_failures)}/200, "
        f"iteration bound violations {len(bound_violations)}/{bound_checks}",
    )
    assert ok, (newton_failures, fp_failures, bound_violations)


def test_6_analytic_structure(acceptance_report):
    rng = np.random.default_rng(SEED + 6)
    instances = random_instances(rng, 50, 4.0)
    problems = []
    for inst in instances:
        pairs = np.sort(rng.uniform(0.0, 1.0, size=(1000, 2)), axis=1)
        for p1, p2 in pairs:
            if p2 - p1 > 1e-12 and not eval_f(inst, p1) > eval_f(inst, p2):
                problems.append(("monotone", inst, p1, p2))

        start = max(0.0, 1.0 - inst.inv_alpha)
        for _ in range(200):
            a, b = rng.uniform(start, 2.0, size=2)
            mid = eval_f(inst, 0.5 * (a + b))
            if mid > 0.5 * (eval_f(inst, a) + eval_f(inst, b)) + 1e-12:
                problems.append(("convex", inst, a, b))

        if not np.all(reciprocal_coefficients(inst).coefficients > 0):
            problems.append(("coefficients", inst))

        for p in rng.uniform(0.01, 0.99, size=20):
            d = eval_f_prime(inst, p)
            h = 1e-6
            fd = (eval_f(inst, p + h) - eval_f(inst, p - h)) / (2 * h)
            if d > 0 or abs(d - fd) > 1e-6 * abs(d):
                problems.append(("derivative", inst, p, d, fd))

        bigger = EngsetInstance(inst.servers, inst.sources, inst.alpha * 1.1)
        for p in rng.uniform(0.0, 1.0, size=20):
            if not eval_f(bigger, p) > eval_f(inst, p):
                problems.append(("traffic", inst, p))

    ok = not problems
    acceptance_report("6 analytic structure", ok, f"50 instances, {len(problems)} violations")
    assert ok, problems[:5]


def test_7_turan(acceptance_report):
    rng = np.random.default_rng(SEED + 7)
    worst = math.inf
    gap_fail, ratio_fail = 0, 0
    for _ in range(500):
        b = int(rng.integers(1, 11))
        c = float(10.0 - rng.uniform(0.0, 10.0))  # (0, 10]
        x = float(rng.uniform(0.0, 50.0))
        gap = turan_gap(TuranInstance(b, c, x))
        worst = min(worst, gap)
        gap_fail += gap < -1e-12
        grid = np.sort(rng.uniform(0.0, 50.0, size=20))
        ratio_fail += not ratio_monotone_check(b, c, grid)
    ok = gap_fail == 0 and ratio_fail == 0
    acceptance_report(
        "7 Turán-type inequality", ok, f"500 samples, min gap {worst:.3e}, ratio violations {ratio_fail}"
    )
    assert ok


def _trace(servers):
    out = io.StringIO()
    code = cli_main(
        ["trace", "--servers", str(servers), "--sources", "20", "--alpha", "1", "--p0", "0.5", "--method", "fixed-point"],
        out=out,
    )
    return code, [float(r["p"]) for r in csv.DictReader(io.StringIO(out.getvalue()))]


def test_8_fixed_point_oscillation(acceptance_report):
    code_conv, conv = _trace(10)
    p_ref = reference_solution(EngsetInstance(10, 20, 1.0))
    diffs = [p - p_ref for p in conv if abs(p - p_ref) > 1e-12]
    alternating = all(a * b < 0 for a, b in zip(diffs, diffs[1:]))
    code_div, div = _trace(15)
    ok = code_conv == 0 and alternating and code_div == 2 and len(div) == 10_001
    acceptance_report(
        "8 oscillation of fixed point iterates",
        ok,
        f"m=10: exit {code_conv}, {len(conv) - 1} iterations, alternating={alternating}; "
        f"m=15: exit {code_div}, tail {div[-2]:.4f}/{div[-1]:.4f}",
    )
    assert ok


@pytest.mark.parametrize("alpha", [1.5, 2.0, 4.0])
def test_convexity_scan_heavy_traffic_informational(alpha, acceptance_report):
    # open question: convexity on all of [0, 1] when alpha > 1; reported, never gating
    grid = np.linspace(0.0, 1.0, 201)
    worst = math.inf
    for m in range(1, 20):
        inst = EngsetInstance(m, 20, alpha)
        f = np.array([eval_f(inst, p) for p in grid])
        worst = min(worst, float(np.min(f[:-2] - 2 * f[1:-1] + f[2:])))
    acceptance_report(f"info convexity scan on [0,1], N=20, alpha={alpha}", True, f"min second difference {worst:.2e}")
