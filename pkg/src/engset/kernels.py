"""Hot inner loops: series evaluation and the three root-finding iterations.

Every kernel is compiled with ``numba.njit`` unless the environment variable
``ENGSET_DISABLE_NUMBA`` is set to a truthy value (or numba is missing), in
which case the numpy implementations below are used instead.  The flag is read
once, at import time.

Kernels take plain scalars and float64 arrays; validation lives in
:mod:`engset.core` and :mod:`engset.solvers`.
"""

import math
import os

import numpy as np
from numpy.polynomial import polynomial as npoly

STATUS_CONVERGED = 0
STATUS_DIVERGED = 1
STATUS_MAX_ITER = 2


def _numba_requested():
    flag = os.environ.get("ENGSET_DISABLE_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes", "on"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _numba_requested()

if USE_NUMBA:
    from numba import njit

    jit = njit(cache=True, nogil=True)
else:

    def jit(fn):
        return fn


# ---------------------------------------------------------------------------
# Loop kernels (compiled by numba)
# ---------------------------------------------------------------------------


def _qseries_loop(m, s, q):
    # 1/f and d(1/f)/dP as a series in q = P + 1/alpha - 1 (all terms >= 0 when q >= 0).
    # v holds m^(x+1) / (s)_{x+1} * q^x.
    g = 1.0
    dg = 0.0
    v = m / s
    for x in range(m):
        dg += (x + 1) * v
        g += v * q
        v *= (m - 1 - x) / (s + 1 + x) * q
    return g, dg


def _horner_loop(coeffs, p):
    n = coeffs.shape[0]
    g = coeffs[n - 1]
    dg = 0.0
    for i in range(n - 2, -1, -1):
        dg = dg * p + g
        g = g * p + coeffs[i]
    return g, dg


def _coefficients_loop(m, s, r):
    out = np.empty(m + 1)
    prefactor = 1.0  # m^(y) / (s)_y
    for y in range(m + 1):
        k = m - y
        if s == 1:
            # (s - 1)_{k - z} vanishes unless z = k
            d = r**k
        else:
            t = 1.0
            for j in range(k):
                t *= (s - 1 + j) / (s + y + j)
            d = 0.0
            for z in range(k + 1):
                d += t
                if z < k:
                    t *= r * (1 + y + z) * (k - z) / ((z + 1) * (s + k - z - 2))
        out[y] = prefactor * d
        if y < m:
            prefactor *= (m - y) / (s + y)
    return out


def _hyp2f1_loop(a, b, c, z):
    # b is a nonpositive integer; validated by the caller
    n = -int(b)
    term = 1.0
    total = 1.0
    for x in range(n):
        term *= (a + x) * (b + x) / ((c + x) * (x + 1)) * z
        total += term
    return total


# ---------------------------------------------------------------------------
# numpy kernels (fallback path)
# ---------------------------------------------------------------------------


def _qseries_np(m, s, q):
    # far outside [0, 1] the series overflows to inf, as in the compiled path
    with np.errstate(over="ignore", invalid="ignore"):
        x = np.arange(m - 1)
        v = np.cumprod(np.concatenate(([m / s], (m - 1 - x) / (s + 1 + x) * q)))
        return 1.0 + q * v.sum(), float(np.dot(np.arange(1, m + 1), v))


def _horner_np(coeffs, p):
    with np.errstate(over="ignore", invalid="ignore"):
        return float(npoly.polyval(p, coeffs)), float(npoly.polyval(p, npoly.polyder(coeffs)))


def _coefficients_np(m, s, r):
    y = np.arange(m + 1)
    prefactor = np.concatenate(([1.0], np.cumprod((m - y[:-1]) / (s + y[:-1]))))
    d = np.empty(m + 1)
    for yy in range(m + 1):
        k = m - yy
        if s == 1:
            d[yy] = r**k
            continue
        j = np.arange(k)
        t0 = np.prod((s - 1 + j) / (s + yy + j))
        z = np.arange(k)
        ratios = r * (1 + yy + z) * (k - z) / ((z + 1) * (s + k - z - 2))
        d[yy] = t0 * (1.0 + np.cumprod(ratios).sum())
    return prefactor * d


def _hyp2f1_np(a, b, c, z):
    x = np.arange(-int(b))
    return float(1.0 + np.cumprod((a + x) * (b + x) / ((c + x) * (x + 1)) * z).sum())


if USE_NUMBA:
    qseries = jit(_qseries_loop)
    horner = jit(_horner_loop)
    reciprocal_coefficients = jit(_coefficients_loop)
    hyp2f1_terminating = jit(_hyp2f1_loop)
else:
    qseries = _qseries_np
    horner = _horner_np
    reciprocal_coefficients = _coefficients_np
    hyp2f1_terminating = _hyp2f1_np


@jit
def reciprocal_pair(m, s, r, coeffs, p):
    """Return ``(1/f(p), d/dp 1/f(p))``.

    ``coeffs`` must hold the positive P-polynomial coefficients whenever
    ``p + r - 1 < 0`` can occur; otherwise an empty array is fine.
    """
    q = p + r - 1.0
    if q >= 0.0:
        return qseries(m, s, q)
    return horner(coeffs, p)


# ---------------------------------------------------------------------------
# Iterations
# ---------------------------------------------------------------------------


@jit
def fixed_point_loop(m, s, r, coeffs, p0, tol, max_iter, trace):
    p = p0
    trace[0] = p0
    for n in range(1, max_iter + 1):
        g, _ = reciprocal_pair(m, s, r, coeffs, p)
        p_new = 1.0 / g
        trace[n] = p_new
        if not math.isfinite(p_new):
            return p_new, n, STATUS_DIVERGED
        if abs(p_new - p) <= tol:
            return p_new, n, STATUS_CONVERGED
        p = p_new
    return p, max_iter, STATUS_MAX_ITER


@jit
def newton_loop(m, s, r, coeffs, p0, tol, max_iter, trace):
    p = p0
    trace[0] = p0
    for n in range(1, max_iter + 1):
        g, dg = reciprocal_pair(m, s, r, coeffs, p)
        f = 1.0 / g
        fprime = -(dg / g) / g
        # p - (f - p) / (f' - 1) rearranged; every term is >= 0 since f' <= 0
        p_new = (f - p * fprime) / (1.0 - fprime)
        trace[n] = p_new
        if not math.isfinite(p_new) or p_new < 0.0:
            return p_new, n, STATUS_DIVERGED
        if abs(p_new - p) <= tol:
            return p_new, n, STATUS_CONVERGED
        p = p_new
    return p, max_iter, STATUS_MAX_ITER


@jit
def bisection_loop(m, s, r, coeffs, tol, max_iter, trace):
    lo = 0.0
    hi = 1.0
    n = 0
    trace[0] = 0.5
    while hi - lo > tol:
        if n == max_iter:
            return 0.5 * (lo + hi), n, STATUS_MAX_ITER
        mid = 0.5 * (lo + hi)
        g, _ = reciprocal_pair(m, s, r, coeffs, mid)
        if 1.0 / g - mid > 0.0:
            lo = mid
        else:
            hi = mid
        n += 1
        trace[n] = 0.5 * (lo + hi)
    return 0.5 * (lo + hi), n, STATUS_CONVERGED
