"""Domain types and evaluation of the Engset map ``f``, ``1/f`` and ``f'``.

The blocking probability ``P*`` is the fixed point of

    f(P) = C(N-1, m) M^m / sum_{X=0}^{m} C(N-1, X) M^X,   M = alpha / (1 - alpha (1 - P)),

and ``1/f(P)`` is the terminating hypergeometric polynomial
``2F1(1, -m; N-m; 1 - P - 1/alpha)``.  With ``Q = P + 1/alpha - 1`` it reads

    1/f(P) = sum_X m^(X) / (N-m)_X * Q^X,

a sum of nonnegative terms when ``Q >= 0``.  When ``Q < 0`` (only possible
for ``alpha > 1``) the same polynomial is re-expanded in powers of ``P``,
whose coefficients are all positive.  Either way no cancellation occurs and
the removable singularity at ``P = 1 - 1/alpha`` never shows up.
"""

from __future__ import annotations

import math
import numbers
import threading
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CoefficientOverflowError, DomainError, InvalidInputError, InvalidParametersError

DEFAULT_TOL = 2.0**-24
DEFAULT_P0 = 0.5
DEFAULT_MAX_ITER = 10_000


def _is_int(value) -> bool:
    return isinstance(value, numbers.Integral) and not isinstance(value, bool)


@dataclass(frozen=True)
class EngsetInstance:
    """One queue: ``servers`` (m), ``sources`` (N) and per-source traffic ``alpha``.

    Requires ``0 < m < N`` and a finite ``alpha > 0``; the degenerate cases are
    handled by :func:`engset.solvers.solve` before an instance is built.
    """

    servers: int
    sources: int
    alpha: float

    def __post_init__(self):
        if not (_is_int(self.servers) and _is_int(self.sources)):
            raise InvalidInputError("servers and sources must be integers")
        if not 0 < self.servers < self.sources:
            raise InvalidInputError(
                f"need 0 < servers < sources, got servers={self.servers}, sources={self.sources}"
            )
        alpha = float(self.alpha)
        if not (math.isfinite(alpha) and alpha > 0.0):
            raise InvalidInputError(f"alpha must be finite and positive, got {self.alpha!r}")
        object.__setattr__(self, "servers", int(self.servers))
        object.__setattr__(self, "sources", int(self.sources))
        object.__setattr__(self, "alpha", alpha)

    @property
    def idle(self) -> int:
        """``N - m``."""
        return self.sources - self.servers

    @property
    def inv_alpha(self) -> float:
        return 1.0 / self.alpha

    def shift(self, p: float) -> float:
        """``Q = P + 1/alpha - 1``, the argument of the nonnegative series."""
        return p + self.inv_alpha - 1.0


@dataclass(frozen=True)
class ReciprocalPolynomial:
    """``1/f(P) = sum_Y coefficients[Y] * P**Y`` with every coefficient positive."""

    coefficients: np.ndarray = field(repr=False)
    alpha_used: float

    def __post_init__(self):
        coeffs = np.array(self.coefficients, dtype=np.float64)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return self.coefficients.shape[0] - 1

    def __call__(self, p: float) -> float:
        return float(kernels.horner(self.coefficients, float(p))[0])

    def derivative(self, p: float) -> float:
        return float(kernels.horner(self.coefficients, float(p))[1])


@dataclass(frozen=True)
class SolverConfig:
    p0: float = DEFAULT_P0
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    trace: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.p0) and 0.0 <= self.p0 <= 1.0):
            raise InvalidInputError(f"p0 must lie in [0, 1], got {self.p0!r}")
        if not (math.isfinite(self.tol) and self.tol > 0.0):
            raise InvalidInputError(f"tol must be positive, got {self.tol!r}")
        if not _is_int(self.max_iter) or self.max_iter < 1:
            raise InvalidInputError(f"max_iter must be a positive integer, got {self.max_iter!r}")


def pochhammer(c: float, x: int) -> float:
    """Rising factorial ``c (c+1) ... (c+x-1)``; 1 for ``x == 0``."""
    if x < 0:
        raise InvalidInputError("pochhammer needs a nonnegative integer count")
    return math.prod(c + i for i in range(x)) if x else 1.0


def falling_factorial(c: float, x: int) -> float:
    """``c (c-1) ... (c-x+1)``, equal to ``(-c)_x (-1)^x``."""
    if x < 0:
        raise InvalidInputError("falling_factorial needs a nonnegative integer count")
    return math.prod(c - i for i in range(x)) if x else 1.0


def hyp2f1_terminating(a: float, b: float, c: float, z: float) -> float:
    """Gauss ``2F1(a, b; c; z)`` for a nonpositive integer ``b``.

    The series stops after ``|b| + 1`` terms and is accumulated with the
    running term ratio ``(a+X)(b+X) / ((c+X)(X+1)) * z``.
    """
    if float(b) != math.floor(b) or b > 0:
        raise InvalidParametersError(f"b must be a nonpositive integer, got {b!r}")
    n = -int(b)
    for x in range(n):
        if c + x == 0:
            raise InvalidParametersError(
                f"c={c!r} makes the denominator (c)_{x + 1} vanish before the series terminates"
            )
    return float(kernels.hyp2f1_terminating(float(a), float(b), float(c), float(z)))


_COEFF_CACHE_SIZE = 256
_coeff_cache: OrderedDict[tuple[int, int, float], ReciprocalPolynomial] = OrderedDict()
_coeff_lock = threading.Lock()


def _build_coefficients(inst: EngsetInstance) -> ReciprocalPolynomial:
    with np.errstate(over="ignore", invalid="ignore"):
        coeffs = np.asarray(
            kernels.reciprocal_coefficients(inst.servers, inst.idle, inst.inv_alpha)
        )
    if not np.all(np.isfinite(coeffs)):
        raise CoefficientOverflowError(
            f"reciprocal coefficients overflow double precision for {inst}"
        )
    return ReciprocalPolynomial(coeffs, inst.alpha)


def reciprocal_coefficients(inst: EngsetInstance) -> ReciprocalPolynomial:
    """Positive coefficients of ``1/f`` as a polynomial in ``P``.

    O(m^2) work; results are cached per instance and the cache is safe to
    share between threads (each key is computed once).
    """
    key = (inst.servers, inst.sources, inst.alpha)
    with _coeff_lock:
        poly = _coeff_cache.get(key)
        if poly is None:
            poly = _build_coefficients(inst)
            _coeff_cache[key] = poly
            if len(_coeff_cache) > _COEFF_CACHE_SIZE:
                _coeff_cache.popitem(last=False)
        else:
            _coeff_cache.move_to_end(key)
    return poly


_EMPTY = np.empty(0)


def kernel_coefficients(inst: EngsetInstance) -> np.ndarray:
    """Coefficient array to hand to the kernels: empty when ``alpha <= 1``."""
    if inst.alpha > 1.0:
        return reciprocal_coefficients(inst).coefficients
    return _EMPTY


def _reciprocal_pair(inst: EngsetInstance, p: float) -> tuple[float, float]:
    p = float(p)
    if not p >= 0.0:
        raise DomainError(f"P must be nonnegative, got {p!r}")
    if inst.shift(p) >= 0.0:
        g, dg = kernels.qseries(inst.servers, inst.idle, inst.shift(p))
    else:
        g, dg = kernels.horner(reciprocal_coefficients(inst).coefficients, p)
    return float(g), float(dg)


def eval_reciprocal(inst: EngsetInstance, p: float) -> float:
    """``1/f(P)``."""
    return _reciprocal_pair(inst, p)[0]


def eval_f(inst: EngsetInstance, p: float) -> float:
    """The Engset map ``f(P)`` for ``P >= 0``."""
    return 1.0 / _reciprocal_pair(inst, p)[0]


def eval_f_prime(inst: EngsetInstance, p: float) -> float:
    """``f'(P) = -g'(P) / g(P)**2`` with ``g = 1/f``."""
    g, dg = _reciprocal_pair(inst, p)
    return -(dg / g) / g
