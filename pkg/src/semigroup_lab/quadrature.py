"""Thin wrappers around QUADPACK that turn silent warnings into errors,
plus a golden-section maximizer."""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach its tolerance."""


class InnerMaxError(RuntimeError):
    """A maximum could not be bracketed inside the search interval."""


def quad(f, a, b, epsabs=1e-14, epsrel=1e-10, limit=400, **kw) -> tuple[float, float]:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel, limit=limit, **kw)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature on [{a}, {b}] did not converge: {exc}") from None
    if not math.isfinite(val):
        raise QuadratureError(f"quadrature on [{a}, {b}] produced {val}")
    return val, err


def quad_vec(f, a, b, epsabs=1e-13, epsrel=1e-10, points=None, limit=2000) -> tuple[np.ndarray, float]:
    val, err, info = integrate.quad_vec(f, a, b, epsabs=epsabs, epsrel=epsrel, points=points,
                                        limit=limit, full_output=True)
    if not info.success:
        raise QuadratureError(f"vector quadrature on [{a}, {b}] did not converge: {info.message}")
    return val, err


INV_PHI = (math.sqrt(5) - 1) / 2


def golden_max(f, a: float, b: float, tol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol * (1 + abs(a) + abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    fa, fb = f(a), f(b)
    best = max(((fc, c), (fd, d), (fa, a), (fb, b)))
    return best[1], best[0]


def scan_then_golden(logf, lo: float, hi: float, n_scan: int = 65, tol: float = 1e-11) -> tuple[float, float]:
    """Grid pre-scan over ``[lo, hi]`` followed by golden refinement of the best cell.

    ``logf`` must accept arrays. Raises :class:`InnerMaxError` when the best grid
    point is the upper end, i.e. the maximum is not bracketed.
    """
    xs = np.linspace(lo, hi, n_scan)
    vals = logf(xs)
    if not np.all(np.isfinite(vals) | (vals == -np.inf)):
        raise InnerMaxError("non-finite values during pre-scan")
    j = int(np.argmax(vals))
    if j == n_scan - 1 and vals[-1] > vals[-2]:
        raise InnerMaxError(f"maximum not bracketed in [{lo}, {hi}]")
    a = xs[max(j - 1, 0)]
    b = xs[min(j + 1, n_scan - 1)]
    x, v = golden_max(lambda x: float(logf(np.asarray(x))), a, b, tol=tol)
    if vals[j] > v:
        return float(xs[j]), float(vals[j])
    return x, v
