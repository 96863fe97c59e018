"""Root finding on ``P -> f(P) - P``: bisection, fixed point iteration and Newton."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .core import EngsetInstance, SolverConfig, eval_f, eval_f_prime, kernel_coefficients
from .errors import InvalidInputError


class Method(str, enum.Enum):
    BISECTION = "bisection"
    FIXED_POINT = "fixed_point"
    NEWTON = "newton"
    AUTO = "auto"


class Status(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    MAX_ITER_EXCEEDED = "max_iter_exceeded"


_STATUS = {
    kernels.STATUS_CONVERGED: Status.CONVERGED,
    kernels.STATUS_DIVERGED: Status.DIVERGED,
    kernels.STATUS_MAX_ITER: Status.MAX_ITER_EXCEEDED,
}


@dataclass(frozen=True)
class SolveResult:
    p_star: float
    iterations: int
    status: Status
    residual: float
    method: Method
    trace: Optional[tuple[float, ...]] = None

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _finish(inst, cfg, method, p, n, code, buf) -> SolveResult:
    p = float(p)
    if math.isfinite(p) and p >= 0.0:
        residual = eval_f(inst, p) - p
    else:
        residual = math.nan
    trace = tuple(float(v) for v in buf[: n + 1]) if cfg.trace else None
    return SolveResult(p, int(n), _STATUS[int(code)], residual, method, trace)


def _args(inst: EngsetInstance):
    return inst.servers, inst.idle, inst.inv_alpha, kernel_coefficients(inst)


def bisect(inst: EngsetInstance, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Bisection on ``[0, 1]`` until the bracket is no wider than ``cfg.tol``.

    ``f(0) > 0`` and ``f(1) < 1`` always hold, so the bracket is valid and the
    iteration count is ``ceil(-log2(tol))`` whatever the instance.  ``p0`` is
    ignored.
    """
    buf = np.empty(cfg.max_iter + 1)
    p, n, code = kernels.bisection_loop(*_args(inst), cfg.tol, cfg.max_iter, buf)
    return _finish(inst, cfg, Method.BISECTION, p, n, code, buf)


def fixed_point(inst: EngsetInstance, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Iterate ``P_n = f(P_{n-1})`` until ``|P_n - P_{n-1}| <= tol``.

    Hitting ``max_iter`` is reported as ``max_iter_exceeded``; that is how a
    divergent (oscillating) run shows up.
    """
    buf = np.empty(cfg.max_iter + 1)
    p, n, code = kernels.fixed_point_loop(*_args(inst), cfg.p0, cfg.tol, cfg.max_iter, buf)
    return _finish(inst, cfg, Method.FIXED_POINT, p, n, code, buf)


def newton(inst: EngsetInstance, cfg: SolverConfig = SolverConfig()) -> SolveResult:
    """Newton's method on ``f(P) - P``.

    ``f' <= 0`` keeps the denominator ``f' - 1`` at or below -1, so no guard
    is needed.  Iterates are not clamped: each update is a convex combination
    of ``P`` and ``f(P)`` and therefore stays positive.
    """
    buf = np.empty(cfg.max_iter + 1)
    p, n, code = kernels.newton_loop(*_args(inst), cfg.p0, cfg.tol, cfg.max_iter, buf)
    return _finish(inst, cfg, Method.NEWTON, p, n, code, buf)


def _auto(inst: EngsetInstance, cfg: SolverConfig) -> SolveResult:
    first = newton(inst, cfg)
    if first.converged:
        return first
    fallback = bisect(inst, cfg)
    trace = None
    if cfg.trace:
        trace = first.trace + fallback.trace
    return SolveResult(
        fallback.p_star,
        first.iterations + fallback.iterations,
        fallback.status,
        fallback.residual,
        Method.BISECTION,
        trace,
    )


_DISPATCH = {
    Method.BISECTION: bisect,
    Method.FIXED_POINT: fixed_point,
    Method.NEWTON: newton,
    Method.AUTO: _auto,
}


def _trivial(p: float, method: Method, cfg: SolverConfig) -> SolveResult:
    return SolveResult(p, 0, Status.CONVERGED, 0.0, method, (p,) if cfg.trace else None)


def solve(
    m: int,
    n_sources: int,
    alpha: float,
    cfg: SolverConfig = SolverConfig(),
    method: Method | str = Method.AUTO,
) -> SolveResult:
    """Blocking probability for ``m`` servers, ``n_sources`` sources and traffic ``alpha``.

    No servers means every request is blocked (``P = 1``); at least as many
    servers as sources, or no traffic, means nothing is (``P = 0``).  Those
    cases return immediately.  ``Method.AUTO`` runs Newton and falls back to
    bisection if Newton does not converge.
    """
    method = Method(method)
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 0:
        raise InvalidInputError(f"servers must be a nonnegative integer, got {m!r}")
    if isinstance(n_sources, bool) or not isinstance(n_sources, (int, np.integer)) or n_sources < 1:
        raise InvalidInputError(f"sources must be a positive integer, got {n_sources!r}")
    alpha = float(alpha)
    if not math.isfinite(alpha) or alpha < 0.0:
        raise InvalidInputError(f"alpha must be finite and nonnegative, got {alpha!r}")

    if m == 0:
        return _trivial(1.0, method, cfg)
    if m >= n_sources or alpha == 0.0:
        return _trivial(0.0, method, cfg)
    return _DISPATCH[method](EngsetInstance(int(m), int(n_sources), alpha), cfg)


def iteration_bound(inst: EngsetInstance, k: int, epsilon: float) -> Optional[int]:
    """A-priori number of fixed point iterations from ``P_0 = 0``.

    With ``q = |f'(f^{2k}(0))| < 1`` the iterate ``P_{2k+l}`` is within
    ``epsilon`` of ``P*`` once ``l >= ceil(log_q(epsilon - epsilon q))``.
    Returns ``2k + l`` or ``None`` when ``q >= 1``.  Only valid for
    ``alpha <= 1``.
    """
    if inst.alpha > 1.0:
        raise InvalidInputError("iteration_bound requires alpha <= 1")
    if k < 0:
        raise InvalidInputError("k must be nonnegative")
    if not 0.0 < epsilon <= 1.0:
        raise InvalidInputError("epsilon must lie in (0, 1]")

    p = 0.0
    for _ in range(2 * k):
        p = eval_f(inst, p)
    q = abs(eval_f_prime(inst, p))
    if q >= 1.0:
        return None
    if q == 0.0:
        return 2 * k + 1
    steps = math.ceil(math.log(epsilon * (1.0 - q)) / math.log(q))
    return 2 * k + max(steps, 1)
