"""Slow, high-precision reference evaluation used only for verification.

``direct_f`` evaluates the Engset formula exactly as written, with exact
integer binomial coefficients and mpmath arithmetic; it shares no code with
:mod:`engset.core`.
"""

from __future__ import annotations

import math

import mpmath

from .core import EngsetInstance
from .errors import DomainError

WORKING_DPS = 60


def _direct(inst: EngsetInstance, p) -> mpmath.mpf:
    alpha = mpmath.mpf(inst.alpha)
    denom = 1 - alpha * (1 - p)
    if denom == 0:
        raise DomainError("direct formula is undefined at P = 1 - 1/alpha")
    load = alpha / denom
    n1 = inst.sources - 1
    terms = [mpmath.mpf(math.comb(n1, x)) * load**x for x in range(inst.servers + 1)]
    numerator = terms[-1]
    total = mpmath.fsum(sorted(terms, key=abs))
    return numerator / total


def direct_f(inst: EngsetInstance, p: float, dps: int = WORKING_DPS) -> float:
    """``C(N-1, m) M^m / sum_X C(N-1, X) M^X`` with ``M = alpha / (1 - alpha(1-P))``."""
    if not p >= 0:
        raise DomainError(f"P must be nonnegative, got {p!r}")
    with mpmath.workdps(dps):
        return float(_direct(inst, mpmath.mpf(p)))


def reference_solution(inst: EngsetInstance, tol: float = 1e-14, dps: int = WORKING_DPS) -> float:
    """Fixed point of ``direct_f`` by bisection on ``[0, 1]``.

    Bisection continues until the half-width is at most ``tol * min(1, mid)``,
    so tiny blocking probabilities are still resolved to relative accuracy.
    """
    with mpmath.workdps(dps):
        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        for _ in range(4 * dps):
            mid = (lo + hi) / 2
            half = (hi - lo) / 2
            if half <= tol * min(1, mid):
                break
            try:
                value = _direct(inst, mid) - mid
            except DomainError:
                # removable point: step a hair to the side
                shifted = mid + half * mpmath.mpf("1e-6")
                value = _direct(inst, shifted) - shifted
            if value > 0:
                lo = mid
            else:
                hi = mid
        return float((lo + hi) / 2)
