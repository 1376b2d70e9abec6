"""Crank-Nicolson (Cayley transform) iteration with variable stepsizes.

On a normal model each mode evolves by the scalar Cayley factor
``a(tau, lambda) = (1 + tau lambda/2) / (1 - tau lambda/2)``, so the
operator norm of ``prod_j A_d(tau_j) (-A)^{-alpha}`` is
``max_k prod_j |a(tau_j, lambda_k)| |lambda_k|^{-alpha}``. Products are
accumulated as per-mode sums of ``log |a|``; linear-domain products of 1e5
moduli underflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .curves import NormCurve, integer_dyadic_grid
from .matrix_backend import DenseOperator, MatrixError
from .rng import XorShift64Star
from .spectral_calculus import TruncationWarning
from .spectrum import SpectrumSpec

# C x K block of log-moduli held at once; small enough to stay cache-resident
_CHUNK_ELEMS = 1 << 18


@dataclass(frozen=True)
class StepsizeSchedule:
    variant: str
    values: tuple[float, ...]
    seed: int | None = None

    def __post_init__(self):
        if self.variant not in ("constant", "periodic", "random"):
            raise ValueError(f"unknown schedule variant {self.variant!r}")
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals or any(not (0 < v < math.inf) for v in vals):
            raise ValueError("stepsizes must be positive and finite")
        if self.variant == "constant" and len(vals) != 1:
            raise ValueError("constant schedule takes exactly one stepsize")
        if self.variant == "random":
            if len(vals) != 2 or vals[0] > vals[1]:
                raise ValueError("random schedule takes (tau_min, tau_max) with tau_min <= tau_max")
            if self.seed is None:
                raise ValueError("random schedule needs a seed")

    @classmethod
    def constant(cls, tau: float) -> "StepsizeSchedule":
        return cls("constant", (tau,))

    @classmethod
    def periodic(cls, taus) -> "StepsizeSchedule":
        return cls("periodic", tuple(taus))

    @classmethod
    def uniform_random(cls, tau_min: float, tau_max: float, seed: int) -> "StepsizeSchedule":
        return cls("random", (tau_min, tau_max), int(seed))

    @classmethod
    def parse(cls, text: str) -> "StepsizeSchedule":
        """``constant:2``, ``periodic:1,3`` or ``random:0.5,4,seed=42``."""
        name, _, rest = text.partition(":")
        parts = [p.strip() for p in rest.split(",") if p.strip()]
        if name == "constant":
            return cls.constant(float(parts[0]))
        if name == "periodic":
            return cls.periodic([float(p) for p in parts])
        if name == "random":
            seed = None
            nums = []
            for p in parts:
                if p.startswith("seed="):
                    seed = int(p[5:])
                else:
                    nums.append(float(p))
            if seed is None or len(nums) != 2:
                raise ValueError("random schedule syntax: random:tau_min,tau_max,seed=N")
            return cls.uniform_random(nums[0], nums[1], seed)
        raise ValueError(f"unknown schedule {text!r}")

    @property
    def tau_min(self) -> float:
        return min(self.values)

    @property
    def tau_max(self) -> float:
        return max(self.values)

    def taus(self, n: int) -> np.ndarray:
        """``tau_0, ..., tau_{n-1}``."""
        if self.variant == "constant":
            return np.full(n, self.values[0])
        if self.variant == "periodic":
            return np.resize(np.asarray(self.values), n)
        lo, hi = self.values
        return lo + (hi - lo) * XorShift64Star(self.seed).uniform_array(n)

    def describe(self) -> str:
        if self.variant == "constant":
            return f"constant:{self.values[0]:g}"
        if self.variant == "periodic":
            return "periodic:" + ",".join(f"{v:g}" for v in self.values)
        lo, hi = self.values
        return f"random:{lo:g},{hi:g},seed={self.seed}"

    def to_dict(self) -> dict:
        d = {"variant": self.variant, "values": list(self.values), "tau_min": self.tau_min,
             "tau_max": self.tau_max}
        if self.variant == "random":
            d["seed"] = self.seed
            d["distribution"] = "uniform on [tau_min, tau_max], xorshift64*"
        return d


@dataclass
class TrajectoryResult(NormCurve):
    schedule: str = ""
    alpha: float = 0.0


def cayley_scalar(tau: float, lam: complex) -> complex:
    z = 0.5 * tau * lam
    return (1 + z) / (1 - z)


def cayley_log_modulus(tau, lam):
    """``log |a(tau, lambda)|`` without cancellation for modes near the imaginary axis."""
    x = 0.5 * np.multiply(tau, np.real(lam))
    y = 0.5 * np.multiply(tau, np.imag(lam))
    return 0.5 * np.log1p(4 * x / ((1 - x) ** 2 + y**2))


def _log_modulus_block(taus: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """``cayley_log_modulus`` on the outer product of steps and modes, computed in place."""
    x = np.multiply.outer(0.5 * taus, lam.real)
    y = np.multiply.outer(0.5 * taus, lam.imag)
    d = 1.0 - x
    d *= d
    y *= y
    d += y
    x *= 4.0
    x /= d
    np.log1p(x, out=x)
    x *= 0.5
    return x


def _check_samples(samples, N) -> np.ndarray:
    s = np.unique(np.asarray(samples, dtype=np.int64))
    if s.size == 0:
        raise ValueError("no samples requested")
    if s[0] < 0 or s[-1] > N:
        raise ValueError(f"samples must lie in [0, N={N}]")
    return s


def _log_sums(lam: np.ndarray, sched: StepsizeSchedule, samples: np.ndarray):
    """Yield ``(n, S_k(n))`` with ``S_k(n) = sum_{j<n} log|a(tau_j, lambda_k)|``."""
    if sched.variant == "constant":
        L = cayley_log_modulus(sched.values[0], lam)
        for n in samples:
            yield int(n), n * L
        return
    N = int(samples[-1])
    taus = sched.taus(N)
    S = np.zeros(lam.size)
    chunk = max(1, _CHUNK_ELEMS // max(lam.size, 1))
    pos = 0
    idx = 0
    while idx < samples.size and samples[idx] == 0:
        yield 0, S.copy()
        idx += 1
    while idx < samples.size:
        stop = min(pos + chunk, N)
        block = _log_modulus_block(taus[pos:stop], lam)
        np.cumsum(block, axis=0, out=block)
        block += S
        while idx < samples.size and samples[idx] <= stop:
            yield int(samples[idx]), block[samples[idx] - pos - 1].copy()
            idx += 1
        S = block[-1].copy()
        pos = stop


def cn_norm_curve(spec: SpectrumSpec, sched: StepsizeSchedule, alpha: float, N: int,
                  samples=None) -> TrajectoryResult:
    """``max_k exp(S_k(n)) |lambda_k|^{-alpha}`` at each sampled step count."""
    return cn_norm_curves(spec, sched, (alpha,), N, samples)[0]


def cn_norm_curves(spec: SpectrumSpec, sched: StepsizeSchedule, alphas, N: int,
                   samples=None) -> list[TrajectoryResult]:
    """Several smoothness weights sharing one pass over the stepsize sequence."""
    alphas = [float(a) for a in alphas]
    if any(a < 0 for a in alphas):
        raise ValueError("alpha must be nonnegative")
    if samples is None:
        samples = np.concatenate([[0], integer_dyadic_grid(1, N)])
    samples = _check_samples(samples, N)
    lam = spec.eigenvalues
    log_abs = np.log(spec.abs_sq)
    weights = [-0.5 * a * log_abs for a in alphas]
    values = np.empty((len(alphas), samples.size))
    argmax = np.empty((len(alphas), samples.size), dtype=np.int64)
    for i, (n, S) in enumerate(_log_sums(lam, sched, samples)):
        for m, w in enumerate(weights):
            logs = S + w
            j = int(np.argmax(logs))
            values[m, i] = math.exp(logs[j])
            argmax[m, i] = j + 1
    out = []
    for m, alpha in enumerate(alphas):
        tail_safe = spec.family == "custom" or bool(np.all(argmax[m] <= spec.modes / 2))
        if not tail_safe:
            warnings.warn(f"Crank-Nicolson curve on {spec!r}: maximizer beyond K/2", TruncationWarning,
                          stacklevel=3)
        meta = {
            "spectrum": spec.to_dict() if spec.family != "custom" else {"family": "custom", "modes": spec.modes},
            "spectrum_hash": spec.digest,
            "kernel": f"cayley_product*(-A)^-{alpha:g}",
            "modes": spec.modes,
            "tail_safe": tail_safe,
            "schedule": sched.to_dict(),
            "alpha": alpha,
            "steps": N,
        }
        out.append(TrajectoryResult("discrete", samples.copy(), values[m], argmax[m], meta,
                                    schedule=sched.describe(), alpha=alpha))
    return out


def mode_trajectory(spec: SpectrumSpec, sched: StepsizeSchedule, x0, N: int, samples) -> np.ndarray:
    """Complex states ``x_n`` of the diagonal model at each sample (rows)."""
    samples = _check_samples(samples, N)
    x0 = np.asarray(x0, dtype=complex)
    lam = spec.eigenvalues
    if x0.shape != lam.shape:
        raise ValueError("x0 must have one coefficient per mode")
    taus = sched.taus(int(samples[-1]))
    out = np.empty((samples.size, lam.size), dtype=complex)
    x = x0.copy()
    pos = 0
    for i, n in enumerate(samples):
        for tau in taus[pos:n]:
            z = 0.5 * tau * lam
            x *= (1 + z) / (1 - z)
        pos = n
        out[i] = x
    return out


def cn_trajectory_matrix(A, sched: StepsizeSchedule, x0, N: int, samples=None) -> TrajectoryResult:
    """Advance ``x_{n+1} = A_d(tau_n) x_n`` by one linear solve per step and record ``||x_n||``."""
    a = A.entries if isinstance(A, DenseOperator) else np.asarray(A, dtype=complex)
    n_dim = a.shape[0]
    x = np.asarray(x0, dtype=complex).reshape(n_dim).copy()
    if samples is None:
        samples = np.concatenate([[0], integer_dyadic_grid(1, N)])
    samples = _check_samples(samples, N)
    taus = sched.taus(int(samples[-1]))
    eye = np.eye(n_dim)
    lu_cache: dict[float, tuple] = {}
    values = np.empty(samples.size)
    pos = 0
    for i, n in enumerate(samples):
        for tau in taus[pos:n]:
            key = float(tau)
            if key not in lu_cache:
                if len(lu_cache) > 64:
                    lu_cache.clear()
                try:
                    lu_cache[key] = sla.lu_factor(eye - 0.5 * key * a, check_finite=False)
                except (sla.LinAlgError, ValueError) as exc:
                    raise MatrixError(f"Cayley step solve failed at tau={key}: {exc}") from None
            x = sla.lu_solve(lu_cache[key], x + 0.5 * key * (a @ x))
            if not np.all(np.isfinite(x)):
                raise MatrixError("Cayley iteration produced non-finite state")
        pos = n
        values[i] = np.linalg.norm(x)
    meta = {"schedule": sched.to_dict(), "dim": n_dim, "steps": N, "tail_safe": True}
    return TrajectoryResult("discrete", samples, values, np.full(samples.size, -1), meta,
                            schedule=sched.describe(), alpha=0.0)


def cn_constant_maximizer(gamma: float, n: int) -> tuple[float, float]:
    """``w_n`` and ``sqrt(f_n(w_n))`` with ``f_n(w) = ((w+1-2g)/(w+1+2g))^n / w``."""
    if gamma <= 0 or n < 1:
        raise ValueError("need gamma > 0 and n >= 1")
    g = gamma
    w = 2 * math.sqrt(g * g * n * n + g * g - g * n) + 2 * g * n - 1
    if w < g * g + 1:
        raise ValueError(f"w_n = {w:g} < gamma^2 + 1; n={n} is too small")
    log_f = n * math.log1p(-4 * g / (w + 1 + 2 * g)) - math.log(w)
    return w, math.exp(0.5 * log_f)


def cn_branch_limit(gamma: float, n: int) -> float:
    """``((w_n+1-2g)/(w_n+1+2g))^n``, which tends to ``e^{-1}``."""
    w, _ = cn_constant_maximizer(gamma, n)
    return math.exp(n * math.log1p(-4 * gamma / (w + 1 + 2 * gamma)))
