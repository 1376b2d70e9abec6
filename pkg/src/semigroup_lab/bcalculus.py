"""B-space seminorm ``||f||_B0 = int_0^inf sup_eta |f'(xi + i eta)| dxi`` and the
auxiliary integrals ``F_alpha(t)`` for the family ``e^{-t/(z+1)} / (z+1)^alpha``.

Write ``w = z + 1 = s + i eta`` with ``s = xi + 1 >= 1``. Then
``|e^{-t/w}| = exp(-t s / |w|^2)``, so every sup over a vertical line is a sup
over ``|w|^2 >= s^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .quadrature import InnerMaxError, QuadratureError, quad, scan_then_golden

FAMILY_TAGS = ("hshift", "rpow", "fta")


@dataclass(frozen=True)
class FunctionFamily:
    """``hshift``: e^{-t/(z+1)}; ``rpow``: (z+1)^{-alpha}; ``fta``: their product."""

    tag: str
    t: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.tag not in FAMILY_TAGS:
            raise ValueError(f"unknown function family {self.tag!r}")
        if self.t < 0:
            raise ValueError("t must be nonnegative")
        if self.tag in ("rpow", "fta") and not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @classmethod
    def hshift(cls, t: float) -> "FunctionFamily":
        return cls("hshift", float(t), 0.0)

    @classmethod
    def rpow(cls, alpha: float) -> "FunctionFamily":
        return cls("rpow", 0.0, float(alpha))

    @classmethod
    def fta(cls, t: float, alpha: float) -> "FunctionFamily":
        return cls("fta", float(t), float(alpha))

    @property
    def _a(self) -> float:
        return 0.0 if self.tag == "hshift" else self.alpha

    @property
    def _t(self) -> float:
        return 0.0 if self.tag == "rpow" else self.t

    def __call__(self, z):
        w = np.asarray(z, dtype=complex) + 1.0
        return np.exp(-self._t / w) * w ** (-self._a)

    def derivative(self, z):
        w = np.asarray(z, dtype=complex) + 1.0
        e = np.exp(-self._t / w)
        return self._t * e * w ** (-self._a - 2) - self._a * e * w ** (-self._a - 1)

    @property
    def at_infinity(self) -> complex:
        return 1.0 + 0j if self.tag == "hshift" else 0j

    def log_abs_derivative(self, s, W):
        """``log |f'(w-1)|`` as a function of ``s = Re w`` and ``W = |w|^2``.

        Uses ``|t - alpha w|^2 = (t - alpha s)^2 + alpha^2 (W - s^2)``.
        """
        t, a = self._t, self._a
        W = np.asarray(W, dtype=float)
        with np.errstate(divide="ignore"):
            num = 0.5 * np.log((t - a * s) ** 2 + a * a * np.maximum(W - s * s, 0.0))
        return -t * s / W + num - 0.5 * (a + 2) * np.log(W)

    def log_abs_value(self, s, W):
        W = np.asarray(W, dtype=float)
        return -self._t * s / W - 0.5 * self._a * np.log(W)

    def describe(self) -> str:
        if self.tag == "hshift":
            return f"hshift(t={self.t:g})"
        if self.tag == "rpow":
            return f"rpow(alpha={self.alpha:g})"
        return f"fta(t={self.t:g}, alpha={self.alpha:g})"


@dataclass(frozen=True)
class BNormResult:
    b0: float
    sup_norm: float
    at_infinity: complex
    envelope: float | None
    error: float

    @property
    def ratio(self) -> float | None:
        if self.envelope is None or self.envelope == 0:
            return None
        return self.b0 / self.envelope


# --- Lemma quantities -------------------------------------------------------


def _sup_g(t, s, alpha):
    s = np.asarray(s, dtype=float)
    c = (alpha / (2 * math.e)) ** (alpha / 2)
    with np.errstate(over="ignore", divide="ignore"):
        first = np.exp(-t / s - alpha * np.log(s))
        second = c / (t * s) ** (alpha / 2)
    return np.where(t <= alpha * s / 2, first, second)


def sup_g(t: float, s: float, alpha: float) -> float:
    """``sup_{r >= 0} e^{-ts/(s^2+r)} / (s^2+r)^{alpha/2}`` in closed form."""
    if not (t > 0 and s > 1 and alpha > 1):
        raise ValueError("sup_g needs t > 0, s > 1, alpha > 1")
    return float(_sup_g(t, s, alpha))


def F_alpha(t: float, alpha: float, epsrel: float = 1e-10) -> float:
    """``int_1^inf sup_g(t, s, alpha) ds`` by adaptive quadrature.

    The branch point ``s* = 2t/alpha`` splits the range. The tail beyond it is
    integrated in ``u = 1/s`` where the integrand becomes ``u^(alpha-2) e^{-tu}``;
    the algebraic factor is handled as a quadrature weight.
    """
    if not (t > 0 and alpha > 1):
        raise ValueError("F_alpha needs t > 0 and alpha > 1")
    s_star = max(2 * t / alpha, 1.0)
    total = 0.0
    if s_star > 1:
        v, _ = quad(lambda s: float(_sup_g(t, s, alpha)), 1.0, s_star, epsrel=epsrel, epsabs=0.0)
        total += v
    # sup_g(t, 1/u) / u^2 = u^(alpha-2) * [sup_g(t, 1/u) * u^(-alpha)]; the bracket -> 1 as u -> 0
    def smooth(u):
        return float(_sup_g(t, 1.0 / u, alpha)) * u ** (-alpha) if u > 0 else 1.0

    v, _ = quad(smooth, 0.0, 1.0 / s_star, weight="alg", wvar=(alpha - 2.0, 0.0), epsrel=epsrel, epsabs=0.0)
    return total + v


def F_alpha_analytic(t: float, alpha: float) -> float:
    """Piecewise closed form of ``F_alpha`` via the lower incomplete gamma function."""
    if not (t > 0 and alpha > 1):
        raise ValueError("F_alpha needs t > 0 and alpha > 1")

    def lower_gamma(a, x):
        return special.gammainc(a, x) * special.gamma(a)

    if t <= alpha / 2:
        return t ** (1 - alpha) * lower_gamma(alpha - 1, t)
    c = (alpha / (2 * math.e)) ** (alpha / 2)
    h = alpha / 2
    if alpha == 2:
        first = c * math.log(t) / t
    else:
        first = c / t**h * ((2 * t / alpha) ** (1 - h) - 1) / (1 - h)
    return first + t ** (1 - alpha) * lower_gamma(alpha - 1, alpha / 2)


def gamma_constant(alpha: float) -> float:
    """``Gamma(alpha - 1)``, the small-t bound constant; diagnostics only."""
    return float(special.gamma(alpha - 1))


# --- sup over vertical lines ------------------------------------------------


def _line_sup(logfun, s: float, t: float, a: float) -> float:
    """``max over W >= s^2`` of ``logfun(s, W)`` searched in ``u = log(W/s^2)``."""
    upper = math.log(max(8.0 * (t / s + a + 2.0), 4.0)) + 2.0
    x, v = scan_then_golden(lambda u: logfun(s, s * s * np.exp(u)), 0.0, upper)
    return v


def sup_abs_derivative(f: FunctionFamily, xi: float) -> float:
    """``sup_eta |f'(xi + i eta)|`` by pre-scan plus golden-section search."""
    return math.exp(_line_sup(f.log_abs_derivative, xi + 1.0, f._t, f._a))


def sup_modulus(f: FunctionFamily) -> float:
    """``||f||_inf``; by the maximum principle it is the sup over the imaginary axis."""
    try:
        boundary = math.exp(_line_sup(f.log_abs_value, 1.0, f._t, f._a))
    except InnerMaxError:
        # |f| still increasing at the top of the search range: the sup is the limit f(inf)
        boundary = 0.0
    return max(abs(f.at_infinity), boundary)


def b0_norm(f: FunctionFamily, epsrel: float = 1e-10) -> BNormResult:
    """``||f||_B0`` by outer adaptive quadrature of the inner line-sup.

    Panels are split at ``xi = 1`` and at the images ``2t/a - 1`` of the
    branch points of the three power weights involved. Raises
    :class:`InnerMaxError` or :class:`QuadratureError` distinctly.
    """
    t, a = f._t, f._a
    breaks = {0.0, 1.0}
    for p in (a, a + 1, a + 2):
        if p > 0 and t > 0 and 2 * t / p - 1 > 0:
            breaks.add(2 * t / p - 1)
    edges = sorted(breaks)

    def integrand(xi):
        return sup_abs_derivative(f, xi)

    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, e = quad(integrand, lo, hi, epsrel=epsrel)
        total += v
        err += e
    v, e = quad(integrand, edges[-1], math.inf, epsrel=epsrel)
    total += v
    err += e

    sup_norm = sup_modulus(f)
    envelope = None
    if f.tag == "fta":
        envelope = t * F_alpha(t, a + 2) + a * F_alpha(t, a + 1)
    elif f.tag == "hshift" and t > 0:
        envelope = t * F_alpha(t, 2.0)
    elif f.tag == "rpow":
        envelope = 1.0
    return BNormResult(b0=total, sup_norm=sup_norm, at_infinity=f.at_infinity, envelope=envelope, error=err)


__all__ = [
    "BNormResult", "FunctionFamily", "F_alpha", "F_alpha_analytic", "InnerMaxError", "QuadratureError",
    "b0_norm", "gamma_constant", "sup_abs_derivative", "sup_g",
]
