"""Command line front end.

    engset solve --servers 5 --sources 20 --alpha 0.5
    engset table --sources 20 --alpha 1 --format csv
    engset trace --servers 10 --sources 20 --alpha 1 --method fixed-point
    engset turan --b 3 --c 2 --x-max 50 --samples 100 --seed 7

Exit status: 0 on success/convergence, 2 when an iteration does not
converge, 1 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import turan
from .core import DEFAULT_MAX_ITER, DEFAULT_P0, DEFAULT_TOL, EngsetInstance, SolverConfig
from .errors import EngsetError
from .solvers import Method, SolveResult, fixed_point, newton, solve

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2

TABLE_FIELDS = ("m", "p_star", "fixed_point_iters", "newton_iters")
FAIL = "FAIL"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _method(value: str) -> Method:
    return Method(value.replace("-", "_"))


def _add_traffic(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=float, help="offered traffic per source (erlangs)")
    group.add_argument(
        "--total-traffic", type=float, metavar="E", help="total offered traffic; alpha = E / sources"
    )


def _add_iteration(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--p0", type=float, default=DEFAULT_P0)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="engset", description="Engset blocking probability solver")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a single instance")
    p.add_argument("--servers", type=int, required=True)
    p.add_argument("--sources", type=int, required=True)
    _add_traffic(p)
    p.add_argument(
        "--method", choices=["bisection", "fixed-point", "newton", "auto"], default="auto"
    )
    _add_iteration(p)
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("table", help="compare fixed point and Newton iteration counts over m")
    p.add_argument("--sources", type=int, required=True)
    _add_traffic(p)
    p.add_argument("--m-range", metavar="LO:HI", help="inclusive server range (default 1:N-1)")
    _add_iteration(p)
    p.add_argument("--jobs", type=int, default=1, help="rows computed concurrently")
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")

    p = sub.add_parser("trace", help="emit the iterates of one method")
    p.add_argument("--servers", type=int, required=True)
    p.add_argument("--sources", type=int, required=True)
    _add_traffic(p)
    p.add_argument("--method", choices=["fixed-point", "newton"], default="fixed-point")
    _add_iteration(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("turan", help="spot-check the Turán-type inequality")
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _alpha(args) -> float:
    if args.alpha is not None:
        return args.alpha
    if args.sources < 1:
        raise UsageError("--sources must be positive")
    return args.total_traffic / args.sources


def _config(args, trace=False) -> SolverConfig:
    return SolverConfig(p0=args.p0, tol=args.tol, max_iter=args.max_iter, trace=trace)


def _result_record(args, alpha: float, res: SolveResult) -> dict:
    return {
        "servers": args.servers,
        "sources": args.sources,
        "alpha": alpha,
        "p_star": res.p_star,
        "iterations": res.iterations,
        "method": res.method.value,
        "status": res.status.value,
        "residual": res.residual,
    }


def cmd_solve(args, out) -> int:
    alpha = _alpha(args)
    res = solve(args.servers, args.sources, alpha, _config(args), _method(args.method))
    record = _result_record(args, alpha, res)
    if args.format == "json":
        out.write(json.dumps(record) + "\n")
    else:
        out.write(
            f"P* = {res.p_star:.3e}\n"
            f"iterations = {res.iterations}\n"
            f"method = {res.method.value}\n"
            f"status = {res.status.value}\n"
        )
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def _parse_range(text: str | None, n_sources: int) -> range:
    if text is None:
        lo, hi = 1, n_sources - 1
    else:
        try:
            lo_s, hi_s = text.split(":")
            lo, hi = int(lo_s), int(hi_s)
        except ValueError:
            raise UsageError(f"--m-range must look like LO:HI, got {text!r}") from None
    if not 1 <= lo <= hi <= n_sources - 1:
        raise UsageError(f"need 1 <= LO <= HI <= {n_sources - 1}, got {lo}:{hi}")
    return range(lo, hi + 1)


def table_row(m: int, n_sources: int, alpha: float, cfg: SolverConfig) -> dict:
    inst = EngsetInstance(m, n_sources, alpha)
    best = solve(m, n_sources, alpha, cfg, Method.AUTO)
    fp = fixed_point(inst, cfg)
    nt = newton(inst, cfg)
    return {
        "m": m,
        "p_star": best.p_star,
        "fixed_point_iters": fp.iterations if fp.converged else None,
        "newton_iters": nt.iterations if nt.converged else None,
        "_ok": best.converged,
    }


def cmd_table(args, out) -> int:
    alpha = _alpha(args)
    if args.sources < 2:
        raise UsageError("--sources must be at least 2 to tabulate 0 < m < N")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    ms = _parse_range(args.m_range, args.sources)
    cfg = _config(args)
    with ThreadPoolExecutor(max_workers=args.jobs) as pool:
        rows = list(pool.map(lambda m: table_row(m, args.sources, alpha, cfg), ms))
    ok = all(row.pop("_ok") for row in rows)

    def shown(v):
        return FAIL if v is None else v

    if args.format == "json":
        out.write(json.dumps(rows) + "\n")
    elif args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(TABLE_FIELDS)
        for row in rows:
            writer.writerow(
                [row["m"], repr(row["p_star"]), shown(row["fixed_point_iters"]), shown(row["newton_iters"])]
            )
    else:
        out.write(f"{'m':>4}  {'P*':>10}  {'fixed point':>11}  {'Newton':>6}\n")
        for row in rows:
            out.write(
                f"{row['m']:>4}  {row['p_star']:>10.3e}  "
                f"{shown(row['fixed_point_iters']):>11}  {shown(row['newton_iters']):>6}\n"
            )
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def cmd_trace(args, out) -> int:
    alpha = _alpha(args)
    res = solve(args.servers, args.sources, alpha, _config(args, trace=True), _method(args.method))
    points = list(enumerate(res.trace))
    if args.format == "json":
        out.write(
            json.dumps(
                {
                    "method": res.method.value,
                    "status": res.status.value,
                    "iterates": [{"n": n, "p": p} for n, p in points],
                }
            )
            + "\n"
        )
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("n", "p"))
        writer.writerows((n, repr(p)) for n, p in points)
        out.write(buf.getvalue())
    return EXIT_OK if res.converged else EXIT_NOT_CONVERGED


def cmd_turan(args, out) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if not args.x_max >= 0:
        raise UsageError("--x-max must be nonnegative")
    turan.TuranInstance(args.b, args.c)  # validates b and c
    rng = np.random.default_rng(args.seed)
    xs = np.unique(np.concatenate(([0.0], rng.uniform(0.0, args.x_max, args.samples))))
    gaps = [turan.turan_gap(turan.TuranInstance(args.b, args.c, float(x))) for x in xs]
    min_gap = min(gaps)
    gap_ok = min_gap >= -turan.GAP_SLACK
    monotone = turan.ratio_monotone_check(args.b, args.c, xs)
    out.write(
        f"b = {args.b}  c = {args.c}  points = {len(xs)}\n"
        f"min gap = {min_gap:.6e} ({'ok' if gap_ok else 'VIOLATED'})\n"
        f"ratio decreasing = {'yes' if monotone else 'NO'}\n"
    )
    return EXIT_OK if gap_ok and monotone else EXIT_NOT_CONVERGED


COMMANDS = {"solve": cmd_solve, "table": cmd_table, "trace": cmd_trace, "turan": cmd_turan}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args, out)
    except (UsageError, EngsetError) as exc:
        print(f"engset: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
