"""Decay fits and order-of-decay verdicts for sampled curves.

Power laws are fitted by ordinary least squares in log-log coordinates.
Logarithmic factors are never fitted; they only enter through ratios
``value / model`` in :func:`check_order`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MIN_SAMPLES = 8


class FitError(ValueError):
    pass


@dataclass(frozen=True)
class DecayModel:
    """``t^{-power} * (log t)^{log_power}``."""

    power: float
    log_power: float = 0.0
    name: str = ""

    @classmethod
    def power_law(cls, p: float) -> "DecayModel":
        return cls(p, 0.0, f"power:{p:g}")

    @classmethod
    def power_log_half(cls) -> "DecayModel":
        """``sqrt(log t / t)``."""
        return cls(0.5, 0.5, "powerlog")

    @classmethod
    def log_power(cls, beta: float) -> "DecayModel":
        """``(log t)^{-beta}``."""
        return cls(0.0, -beta, f"logpow:{beta:g}")

    @classmethod
    def log_over_power(cls, p: float = 1.0) -> "DecayModel":
        """``log t / t^p``."""
        return cls(p, 1.0, f"logover:{p:g}")

    @classmethod
    def parse(cls, text: str) -> "DecayModel":
        name, _, arg = text.partition(":")
        if name == "power":
            return cls.power_law(float(arg))
        if name == "powerlog":
            return cls.power_log_half()
        if name == "logpow":
            return cls.log_power(float(arg))
        if name == "logover":
            return cls.log_over_power(float(arg) if arg else 1.0)
        raise ValueError(f"unknown decay model {text!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.log_power != 0 and np.any(t <= 1):
            raise FitError("logarithmic models need t > 1")
        out = t ** (-self.power)
        if self.log_power != 0:
            out = out * np.log(t) ** self.log_power
        return out


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    intercept: float
    r_squared: float
    residual_max: float
    window: tuple[float, float]
    samples: int

    def to_dict(self) -> dict:
        return {"exponent": self.exponent, "intercept": self.intercept, "r_squared": self.r_squared,
                "residual_max": self.residual_max, "window": list(self.window), "samples": self.samples}


@dataclass(frozen=True)
class InequalityVerdict:
    """Measured constant of an inequality over a grid.

    ``trend`` is the sup over the last dyadic window divided by the sup over
    the one before it (windows taken in the asymptotic direction).
    """

    probe: str
    grid: str
    constant: float
    finite: bool
    trend: float

    def to_dict(self) -> dict:
        return {"probe": self.probe, "grid": self.grid, "constant": self.constant, "finite": self.finite,
                "trend": self.trend}


@dataclass(frozen=True)
class LiminfVerdict:
    minimum: float
    floor: float
    weight: float
    samples: int

    @property
    def holds(self) -> bool:
        return self.minimum >= self.floor - 1e-9

    def to_dict(self) -> dict:
        return {"minimum": self.minimum, "floor": self.floor, "weight": self.weight, "samples": self.samples,
                "holds": self.holds}


def _select(curve, window):
    x, v = np.asarray(curve.abscissa, float), np.asarray(curve.values, float)
    lo, hi = (x[0], x[-1]) if window is None else window
    if not lo < hi:
        raise FitError(f"degenerate window [{lo}, {hi}]")
    mask = (x >= lo * (1 - 1e-12)) & (x <= hi * (1 + 1e-12))
    return x[mask], v[mask], (float(lo), float(hi))


def fit_power(curve, window=None, burn_in: bool = True) -> DecayFit:
    """Least-squares slope of ``log value`` against ``log abscissa``; exponent = -slope.

    With ``burn_in`` the lowest decade of the window is dropped first.
    """
    x, v, (lo, hi) = _select(curve, window)
    if burn_in:
        keep = x >= lo * 10 * (1 - 1e-12)
        x, v = x[keep], v[keep]
        lo = lo * 10
    if x.size < MIN_SAMPLES:
        raise FitError(f"only {x.size} samples in window (need {MIN_SAMPLES})")
    if np.any(v <= 0):
        raise FitError("values must be strictly positive for a log-log fit")
    lx, lv = np.log(x), np.log(v)
    slope, intercept = np.polyfit(lx, lv, 1)
    resid = lv - (slope * lx + intercept)
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - float(np.sum(resid**2)) / ss_tot)
    return DecayFit(-float(slope), float(intercept), min(r2, 1.0), float(np.max(np.abs(resid))),
                    (lo, hi), int(x.size))


def window_trend(x, r, ascending: bool = True) -> float:
    """Ratio of the sup of ``r`` over the last octave to that over the previous octave.

    ``ascending=False`` treats small abscissas as the asymptotic end (xi -> 0).
    """
    x, r = np.asarray(x, float), np.asarray(r, float)
    if not ascending:
        x = 1.0 / x
    top = x.max()
    last = r[x >= top / 2 * (1 - 1e-12)]
    prev = r[(x >= top / 4 * (1 - 1e-12)) & (x < top / 2 * (1 - 1e-12))]
    if last.size == 0 or prev.size == 0:
        raise FitError("grid too sparse: each of the top two octaves needs a sample")
    den = prev.max()
    if den == 0:
        return math.inf if last.max() > 0 else 1.0
    return float(last.max() / den)


def check_order(curve, model: DecayModel, window=None) -> InequalityVerdict:
    """Measured ``sup value/model`` over the window and its two-octave trend."""
    x, v, (lo, hi) = _select(curve, window)
    if x.size < 2:
        raise FitError("need at least two samples in the window")
    ratio = v / model(x)
    finite = bool(np.all(np.isfinite(ratio)))
    return InequalityVerdict(
        probe=f"order:{model.name}",
        grid=f"[{lo:g}, {hi:g}] ({x.size} samples)",
        constant=float(np.max(ratio)),
        finite=finite,
        trend=window_trend(x, ratio),
    )


def liminf_check(curve, weight: float, floor: float, window=None) -> LiminfVerdict:
    """``min t^weight * value`` over the upper (logarithmic) half of the window."""
    x, v, (lo, hi) = _select(curve, window)
    mid = math.sqrt(lo * hi)
    top = x >= mid
    if np.count_nonzero(top) < 2:
        raise FitError("window too small for a liminf check")
    scaled = x[top] ** weight * v[top]
    return LiminfVerdict(float(np.min(scaled)), float(floor), float(weight), int(np.count_nonzero(top)))
