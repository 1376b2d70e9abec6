"""Exact operator norms of functions of a normal generator.

For a normal operator with point spectrum ``lambda_k`` the norm of ``g(A)`` is
``sup_k |g(lambda_k)|``. All kernels are evaluated in the log domain so that
large ``t`` does not underflow before the maximum is taken.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curves import NormCurve
from .spectrum import SpectrumSpec

KERNEL_TAGS = ("semigroup", "inv_semigroup", "inv_semigroup_frac", "semigroup_frac", "semigroup_resolvent_shift")


class TruncationWarning(UserWarning):
    """The maximizing mode sits in the upper half of the truncated spectrum."""


@dataclass(frozen=True)
class KernelKind:
    tag: str
    alpha: float = 0.0

    def __post_init__(self):
        if self.tag not in KERNEL_TAGS:
            raise ValueError(f"unknown kernel {self.tag!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")

    @classmethod
    def parse(cls, text: str) -> "KernelKind":
        """``semigroup``, ``inv``, ``inv_frac:a``, ``frac:a`` or ``resolvent``."""
        name, _, arg = text.partition(":")
        aliases = {
            "semigroup": "semigroup",
            "inv": "inv_semigroup",
            "inv_semigroup": "inv_semigroup",
            "inv_frac": "inv_semigroup_frac",
            "inv_semigroup_frac": "inv_semigroup_frac",
            "frac": "semigroup_frac",
            "semigroup_frac": "semigroup_frac",
            "resolvent": "semigroup_resolvent_shift",
            "semigroup_resolvent_shift": "semigroup_resolvent_shift",
        }
        if name not in aliases:
            raise ValueError(f"unknown kernel {text!r}")
        tag = aliases[name]
        alpha = float(_parse_number(arg)) if arg else 0.0
        if tag in ("inv_semigroup_frac", "semigroup_frac") and not arg:
            raise ValueError(f"kernel {name} needs an exponent, e.g. {name}:1")
        return cls(tag, alpha)

    def describe(self) -> str:
        if self.tag in ("inv_semigroup_frac", "semigroup_frac"):
            return f"{self.tag}:{self.alpha:g}"
        return self.tag

    def log_values(self, spec: SpectrumSpec, t: float) -> np.ndarray:
        lam = spec.eigenvalues
        w = spec.abs_sq
        if self.tag == "semigroup":
            return t * lam.real
        if self.tag == "inv_semigroup":
            return t * lam.real / w
        if self.tag == "inv_semigroup_frac":
            return t * lam.real / w - 0.5 * self.alpha * np.log(w)
        if self.tag == "semigroup_frac":
            return t * lam.real - 0.5 * self.alpha * np.log(w)
        return t * lam.real - np.log(np.abs(1.0 - lam))


def _parse_number(text: str) -> float:
    if "/" in text:
        num, den = text.split("/")
        return float(num) / float(den)
    return float(text)


def _is_truncated_family(spec: SpectrumSpec) -> bool:
    return spec.family != "custom"


def _kernel_max(spec: SpectrumSpec, kind: KernelKind, t: float) -> tuple[float, int]:
    logs = kind.log_values(spec, t)
    j = int(np.argmax(logs))
    return math.exp(logs[j]), j + 1


def kernel_norm(spec: SpectrumSpec, kind: KernelKind, t: float, warn: bool = True) -> tuple[float, int]:
    """Return ``(max_k |g(lambda_k)|, argmax k)``; k is 1-based."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    value, k = _kernel_max(spec, kind, float(t))
    if warn and _is_truncated_family(spec) and k > spec.modes / 2:
        warnings.warn(
            f"{kind.describe()} at t={t:g}: maximizer k={k} exceeds K/2={spec.modes / 2:g}",
            TruncationWarning,
            stacklevel=2,
        )
    return value, k


def continuous_envelope(gamma: float, alpha: float, t: float) -> float:
    """Continuous relaxation ``(alpha/(2 e gamma t))**(alpha/2)`` of the ExpComb sup."""
    if gamma <= 0 or alpha <= 0:
        raise ValueError("gamma and alpha must be positive")
    threshold = alpha * (gamma**2 + 1) / (2 * gamma)
    if t < threshold * (1 - 1e-14):
        raise ValueError(f"t={t} below validity threshold {threshold}")
    return (alpha / (2 * math.e * gamma * t)) ** (alpha / 2)


def optimality_witness(spec: SpectrumSpec, alpha: float, k: int) -> tuple[float, float]:
    """Witness time for mode ``k`` and the exact norm (ExpComb) or lower bound (PolyComb, beta=1)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 1 <= k <= spec.modes:
        raise ValueError(f"k={k} outside 1..{spec.modes}")
    if spec.family == "exp_comb":
        g = spec.gamma
        t = alpha * (g**2 + k**2) / (2 * g)
        return t, (alpha / (2 * math.e * g * t)) ** (alpha / 2)
    if spec.family == "poly_comb":
        if spec.beta != 1:
            raise ValueError("no optimality witness is available for PolyComb with beta != 1")
        t = alpha * k**3 / 3
        return t, 2 ** (-alpha / 2) * (alpha / (3 * math.e * t)) ** (alpha / 3)
    raise ValueError("optimality witnesses exist only for ExpComb and PolyComb")


def maximizer_index(spec: SpectrumSpec, alpha: float, t: float) -> int:
    """Analytic location of the maximizing mode of the inverse-semigroup kernel."""
    if spec.family == "exp_comb":
        g = spec.gamma
        return max(1, math.ceil(math.sqrt(max(2 * g * t / alpha - g**2, 1.0))))
    if spec.family == "poly_comb":
        b = spec.beta
        return max(1, math.ceil(((2 + b) * t / alpha) ** (1 / (2 + b))))
    return spec.modes


def default_modes(family: str, alpha: float, t_max: float, gamma: float = 1.0, beta: float = 1.0,
                  floor: int = 16) -> int:
    """Smallest power of two K with the analytic maximizer at ``t_max`` below K/2."""
    probe = SpectrumSpec(family, 1, gamma=gamma if family == "exp_comb" else None,
                         beta=beta if family == "poly_comb" else None)
    k_star = maximizer_index(probe, alpha, t_max)
    K = max(floor, 2 * k_star)
    return 1 << (K - 1).bit_length()


def norm_curve(spec: SpectrumSpec, kind: KernelKind, grid, workers: int = 1) -> NormCurve:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")

    def point(t):
        return _kernel_max(spec, kind, float(t))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(point, grid))
    else:
        results = [point(t) for t in grid]
    values = np.array([r[0] for r in results])
    argmax = np.array([r[1] for r in results], dtype=np.int64)
    tail_safe = not _is_truncated_family(spec) or bool(np.all(argmax <= spec.modes / 2))
    if not tail_safe:
        bad = grid[argmax > spec.modes / 2]
        warnings.warn(
            f"{kind.describe()} on {spec!r}: truncation contamination at t={bad[0]:g}"
            f" ({bad.size} samples)",
            TruncationWarning,
            stacklevel=2,
        )
    meta = {
        "spectrum": spec.to_dict() if spec.family != "custom" else {"family": "custom", "modes": spec.modes},
        "spectrum_hash": spec.digest,
        "kernel": kind.describe(),
        "modes": spec.modes,
        "tail_safe": tail_safe,
    }
    return NormCurve("continuous", grid, values, argmax, meta)
