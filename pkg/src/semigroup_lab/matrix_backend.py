"""Dense complex-matrix stand-ins for generators.

Everything here works on small matrices (n <= 200): matrix exponentials,
Cayley steps by linear solves, Lyapunov equations by Kronecker vectorization,
fractional powers by eigendecomposition, and the B-calculus double integral

    f(B) = f(inf) I - (2/pi) int_0^inf xi int_R (xi - i eta + B)^{-2} f'(xi + i eta) deta dxi.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.linalg as sla

from .bcalculus import FunctionFamily
from .quadrature import quad_vec

MAX_DIM = 200
# n^2 x n^2 dense solve; beyond this the integral representation is used
KRON_MAX_DIM = 40
EXPM_MAX_NORM = 2.0**40


class MatrixError(ValueError):
    """A matrix violates the preconditions of an operation."""


class OverscalingError(MatrixError):
    """``||A t||`` too large for a trustworthy scaling-and-squaring result."""


@dataclass(frozen=True, eq=False)
class DenseOperator:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MatrixError("operator must be a square matrix")
        if a.shape[0] > MAX_DIM:
            raise MatrixError(f"dimension {a.shape[0]} exceeds cap {MAX_DIM}")
        if not np.all(np.isfinite(a)):
            raise MatrixError("matrix has non-finite entries")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @classmethod
    def stable(cls, entries) -> "DenseOperator":
        """Construct and insist on spectral abscissa < 0."""
        op = cls(entries)
        if op.spectral_abscissa >= 0:
            raise MatrixError(f"spectral abscissa {op.spectral_abscissa:g} is not negative")
        return op

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.entries)

    @property
    def spectral_abscissa(self) -> float:
        return float(np.max(self.eigenvalues.real))

    @property
    def invertible(self) -> bool:
        return bool(np.min(np.abs(self.eigenvalues)) > 1e-13 * max(1.0, np.linalg.norm(self.entries, 2)))

    @property
    def is_normal(self) -> bool:
        a = self.entries
        return bool(np.allclose(a @ a.conj().T, a.conj().T @ a, atol=1e-12 * max(1.0, np.linalg.norm(a) ** 2)))

    def to_json(self) -> str:
        return json.dumps([[[z.real, z.imag] for z in row] for row in self.entries])

    @classmethod
    def from_json(cls, text: str) -> "DenseOperator":
        return cls(_matrix_from_pairs(json.loads(text)))

    @classmethod
    def load(cls, path) -> "DenseOperator":
        return cls.from_json(Path(path).read_text())


def _matrix_from_pairs(rows) -> np.ndarray:
    try:
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise MatrixError(f"matrix JSON must be rows of [re, im] pairs: {exc}") from None


def matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _as_array(A) -> np.ndarray:
    return A.entries if isinstance(A, DenseOperator) else np.asarray(A, dtype=complex)


def expm(A, t: float = 1.0) -> np.ndarray:
    """``e^{At}`` by scaling and squaring with a diagonal Pade core."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    M = _as_array(A) * t
    if np.linalg.norm(M, 1) > EXPM_MAX_NORM:
        raise OverscalingError(f"||A t||_1 = {np.linalg.norm(M, 1):.3g} exceeds {EXPM_MAX_NORM:.3g}")
    E = sla.expm(M)
    if not np.all(np.isfinite(E)):
        raise OverscalingError("matrix exponential overflowed")
    return E


def cayley(A, tau: float) -> np.ndarray:
    """``(I + tau/2 A)(I - tau/2 A)^{-1}`` via one LU solve."""
    if tau <= 0:
        raise ValueError("tau must be positive")
    a = _as_array(A)
    n = a.shape[0]
    eye = np.eye(n)
    lhs = eye - 0.5 * tau * a
    rhs = eye + 0.5 * tau * a
    try:
        with warnings.catch_warnings():
            # exact zero pivots are reported below as MatrixError
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu = sla.lu_factor(lhs, check_finite=False)
    except (sla.LinAlgError, ValueError) as exc:
        raise MatrixError(f"I - tau/2 A is singular: {exc}") from None
    if np.min(np.abs(np.diag(lu[0]))) <= 1e-14 * max(1.0, np.linalg.norm(lhs, 1), np.linalg.norm(rhs, 1)):
        raise MatrixError("I - tau/2 A is numerically singular")
    # (I - tau/2 A) commutes with (I + tau/2 A), so left and right division agree
    return sla.lu_solve(lu, rhs)


def cayley_residual(A, tau: float, X: np.ndarray) -> float:
    a = _as_array(A)
    eye = np.eye(a.shape[0])
    r = (eye - 0.5 * tau * a) @ X - (eye + 0.5 * tau * a)
    return float(np.max(np.linalg.norm(r, axis=0) / np.maximum(1.0, np.linalg.norm(eye + 0.5 * tau * a, axis=0))))


def lyapunov_solve(A, xi: float = 0.0) -> np.ndarray:
    """Solve ``(A - xi I)^* P + P (A - xi I) = -I``.

    Kronecker vectorization for n <= 40; the integral representation by
    vector quadrature for 40 < n <= 200.
    """
    a = _as_array(A)
    n = a.shape[0]
    if n > MAX_DIM:
        raise MatrixError(f"dimension {n} exceeds cap {MAX_DIM}")
    M = a - xi * np.eye(n)
    if np.max(np.linalg.eigvals(M).real) >= 0:
        raise MatrixError("A - xi I is not stable; the Lyapunov equation has no positive solution")
    if n > KRON_MAX_DIM:
        P = lyapunov_quadrature(a, xi)
    else:
        eye = np.eye(n)
        # column-major vec: vec(X Y Z) = (Z^T kron X) vec(Y)
        L = np.kron(eye, M.conj().T) + np.kron(M.T, eye)
        vecP = np.linalg.solve(L, -eye.reshape(-1, order="F"))
        P = vecP.reshape(n, n, order="F")
    P = 0.5 * (P + P.conj().T)
    if np.min(np.linalg.eigvalsh(P)) <= 0:
        raise MatrixError("Lyapunov solution is not positive definite")
    return P


def lyapunov_residual(A, xi: float, P: np.ndarray) -> float:
    a = _as_array(A)
    M = a - xi * np.eye(a.shape[0])
    return float(np.max(np.abs(M.conj().T @ P + P @ M + np.eye(a.shape[0]))))


def lyapunov_quadrature(A, xi: float = 0.0, epsrel: float = 1e-12) -> np.ndarray:
    """``int_0^inf e^{-2 xi t} (e^{At})^* e^{At} dt`` by adaptive vector quadrature."""
    a = _as_array(A)

    def integrand(t):
        E = expm(a, t)
        return math.exp(-2 * xi * t) * (E.conj().T @ E)

    P, _ = quad_vec(integrand, 0.0, math.inf, epsrel=epsrel, epsabs=1e-15)
    return P


def frac_power(A, alpha: float, max_cond: float = 1e6) -> np.ndarray:
    """``(-A)^alpha`` by eigendecomposition with the principal branch."""
    a = _as_array(A)
    d, V = np.linalg.eig(a)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond > max_cond:
        raise MatrixError(f"eigenbasis condition number {cond:.3g} exceeds {max_cond:.3g}")
    if np.any(np.abs(d) == 0):
        raise MatrixError("A has a zero eigenvalue")
    if np.any((d.real >= 0) & (np.abs(d.imag) == 0)):
        raise MatrixError("-A has an eigenvalue on the branch cut (-inf, 0]")
    powered = np.power(-d.astype(complex), alpha)
    return np.linalg.solve(V.T, (V * powered).T).T


def semigroup_bound(B, t_max: float | None = None, samples: int = 400) -> float:
    """Measured ``K = sup_t ||e^{-Bt}||`` on a log grid; rejects unbounded semigroups."""
    b = _as_array(B)
    eig = np.linalg.eigvals(-b)
    if np.max(eig.real) > 1e-10:
        raise MatrixError("-B generates a growing semigroup")
    if t_max is None:
        gap = -np.max(eig.real[eig.real < -1e-10], initial=-1.0)
        t_max = max(1e3, 50.0 / gap)
    ts = np.concatenate([[0.0], np.geomspace(1e-3, t_max, samples)])
    norms = np.array([np.linalg.norm(expm(-b, t), 2) for t in ts])
    # a Jordan block on the imaginary axis shows up as growth at the end of the range
    if norms[-1] > 1.5 * np.max(norms[: samples // 2]) + 1e-12:
        raise MatrixError("e^{-Bt} appears unbounded")
    return float(np.max(norms))


def _tail_bound(f: FunctionFamily, H: float, normB: float) -> float:
    """Bound on ``int_{|eta|>H} ||(xi - i eta + B)^{-2}|| |f'(xi+i eta)| deta`` for H >= 2||B||."""
    t, a = f._t, f._a
    # |f'(w-1)| <= t/|w|^(a+2) + a/|w|^(a+1), |w| >= |eta|; ||R|| <= 1/(|eta| - ||B||) <= 2/|eta|
    return 8.0 * (t * H ** (-a - 3) / (a + 3) + a * H ** (-a - 2) / (a + 2))


def bcalc_apply(f: FunctionFamily, B, tol: float = 1e-9) -> np.ndarray:
    """Evaluate ``f(B)`` from the B-calculus double integral by nested adaptive quadrature.

    The inner eta-integral is truncated at ``|eta| <= H(xi)`` where the resolvent
    and derivative envelopes certify a tail below ``tol / (1 + xi)^3``.
    """
    b = _as_array(B)
    n = b.shape[0]
    semigroup_bound(b)
    normB = float(np.linalg.norm(b, 2))
    eye = np.eye(n)
    eig = np.linalg.eigvals(b)

    def truncation(xi):
        H = max(2.0 * normB, 1.0)
        budget = tol / (1.0 + xi) ** 3
        while _tail_bound(f, H, normB) > budget:
            H *= 2.0
        return H

    def inner(xi):
        H = truncation(xi)
        pts = {0.0}
        for lam in eig:
            width = xi + lam.real
            for m in (0.0, 1.0, -1.0, 10.0, -10.0):
                p = lam.imag + m * width
                if -H < p < H:
                    pts.add(float(p))

        def g(eta):
            R = np.linalg.solve((xi - 1j * eta) * eye + b, eye)
            return (R @ R) * f.derivative(xi + 1j * eta)

        # the result is multiplied by xi, so its absolute error must decay faster than 1/xi^2
        val, _ = quad_vec(g, -H, H, epsabs=1e-2 * tol / (1.0 + xi) ** 3, epsrel=1e-10, points=sorted(pts))
        return xi * val

    outer, _ = quad_vec(inner, 0.0, math.inf, epsabs=tol, epsrel=1e-9,
                        points=[1.0] + ([2 * f._t / f._a - 1] if f._a > 0 and 2 * f._t / f._a > 1 else []))
    return f.at_infinity * eye - (2.0 / math.pi) * outer
