"""Turán-type inequality for ``h_n(x) = 2F1(1+n, n-b; c+n; -x)``.

For a positive integer ``b``, ``c > 0`` and ``x >= 0``:

    b (c+1) h_1(x)^2 >= (b-1) c h_0(x) h_2(x),

and ``x -> h_1(x) / h_0(x)^2`` is strictly decreasing on ``[0, inf)``.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from typing import Sequence

from .core import hyp2f1_terminating
from .errors import InvalidInputError, UnsupportedParametersError

GAP_SLACK = 1e-12
RATIO_SLACK = 1e-12


@dataclass(frozen=True)
class TuranInstance:
    b: int
    c: float
    x: float = 0.0

    def __post_init__(self):
        if not isinstance(self.b, numbers.Integral) or isinstance(self.b, bool) or self.b < 1:
            raise InvalidInputError(f"b must be a positive integer, got {self.b!r}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise InvalidInputError(f"c must be positive, got {self.c!r}")
        if not (math.isfinite(self.x) and self.x >= 0):
            raise InvalidInputError(f"x must be nonnegative, got {self.x!r}")


def h(n: int, inst: TuranInstance) -> float:
    if n not in (0, 1, 2):
        raise InvalidInputError(f"n must be 0, 1 or 2, got {n!r}")
    if n > inst.b:
        raise UnsupportedParametersError(
            f"h_{n} with b={inst.b} is a non-terminating series"
        )
    return hyp2f1_terminating(1 + n, n - inst.b, inst.c + n, -inst.x)


def turan_gap(inst: TuranInstance) -> float:
    """``b(c+1) h_1^2 - (b-1) c h_0 h_2``; nonnegative for every ``x >= 0``.

    For ``b == 1`` the right-hand side is zero and ``h_2`` is never formed.
    """
    lhs = inst.b * (inst.c + 1) * h(1, inst) ** 2
    if inst.b == 1:
        return lhs
    return lhs - (inst.b - 1) * inst.c * h(0, inst) * h(2, inst)


def ratio(inst: TuranInstance) -> float:
    return h(1, inst) / h(0, inst) ** 2


def ratio_monotone_check(b: int, c: float, grid: Sequence[float]) -> bool:
    """True when ``h_1/h_0^2`` decreases along ``grid`` (up to a relative slack for ties)."""
    grid = [float(x) for x in grid]
    if any(x < 0 for x in grid) or any(x1 <= x0 for x0, x1 in zip(grid, grid[1:])):
        raise InvalidInputError("grid must be strictly increasing and nonnegative")
    values = [ratio(TuranInstance(b, c, x)) for x in grid]
    return all(v1 - v0 <= RATIO_SLACK * abs(v0) for v0, v1 in zip(values, values[1:]))
