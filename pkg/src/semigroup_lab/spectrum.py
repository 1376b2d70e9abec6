"""Eigenvalue families modelling normal generators on l^2.

A normal generator is represented by its point spectrum ``lambda_k`` together
with a truncation count ``K``. Two structured families are provided:

* ``exp_comb``: ``lambda_k = -gamma + i k`` (exponentially stable)
* ``poly_comb``: ``lambda_k = -k**(-beta) + i k`` (polynomially stable)

plus ``custom`` lists, which is how matrix eigenvalue sets enter the same code
path as the structured families.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

FAMILIES = ("exp_comb", "poly_comb", "custom")

# relative slack for the margin inequality; PolyComb sits exactly on |Im|.|Re|^(1/beta) = 1
_MARGIN_RTOL = 1e-12


class SpectrumError(ValueError):
    """Raised for spectra that do not describe a stable invertible generator."""


@dataclass(frozen=True)
class SpectrumSpec:
    family: str
    modes: int
    gamma: float | None = None
    beta: float | None = None
    custom: tuple[complex, ...] = field(default=())

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpectrumError(f"unknown spectrum family {self.family!r}")
        if self.family == "custom":
            vals = tuple(complex(v) for v in self.custom)
            if not vals:
                raise SpectrumError("custom spectrum must be non-empty")
            if len(set(vals)) != len(vals):
                raise SpectrumError("custom spectrum contains duplicates")
            object.__setattr__(self, "custom", vals)
            object.__setattr__(self, "modes", len(vals))
        if int(self.modes) != self.modes or self.modes < 1:
            raise SpectrumError(f"modes must be a positive integer, got {self.modes}")
        object.__setattr__(self, "modes", int(self.modes))
        if self.family == "exp_comb" and not (self.gamma is not None and self.gamma > 0):
            raise SpectrumError("exp_comb needs gamma > 0")
        if self.family == "poly_comb" and not (self.beta is not None and self.beta > 0):
            raise SpectrumError("poly_comb needs beta > 0")
        lam = self.eigenvalues
        bad = np.flatnonzero((lam.real >= 0) | (lam == 0))
        if bad.size:
            k = int(bad[0])
            raise SpectrumError(f"eigenvalue {k + 1} = {lam[k]} is not in the open left half-plane")

    # constructors ---------------------------------------------------------

    @classmethod
    def exp_comb(cls, gamma: float, modes: int) -> "SpectrumSpec":
        return cls("exp_comb", modes, gamma=float(gamma))

    @classmethod
    def poly_comb(cls, beta: float, modes: int) -> "SpectrumSpec":
        return cls("poly_comb", modes, beta=float(beta))

    @classmethod
    def from_eigenvalues(cls, values) -> "SpectrumSpec":
        vals = tuple(complex(v) for v in np.atleast_1d(np.asarray(values, dtype=complex)))
        return cls("custom", len(vals), custom=vals)

    def with_modes(self, modes: int) -> "SpectrumSpec":
        if self.family == "custom":
            raise SpectrumError("cannot re-truncate a custom spectrum")
        return SpectrumSpec(self.family, modes, gamma=self.gamma, beta=self.beta)

    # data -----------------------------------------------------------------

    @cached_property
    def eigenvalues(self) -> np.ndarray:
        if self.family == "custom":
            lam = np.array(self.custom, dtype=complex)
        else:
            k = np.arange(1, self.modes + 1, dtype=float)
            if self.family == "exp_comb":
                re = np.full_like(k, -self.gamma)
            else:
                re = -(k ** -self.beta)
            lam = re + 1j * k
        lam.setflags(write=False)
        return lam

    @cached_property
    def abs_sq(self) -> np.ndarray:
        """|lambda_k|^2, computed without cancellation."""
        lam = self.eigenvalues
        out = lam.real**2 + lam.imag**2
        out.setflags(write=False)
        return out

    @property
    def is_exponentially_stable(self) -> bool:
        if self.family == "exp_comb":
            return True
        if self.family == "poly_comb":
            return False
        return True  # finite sets always have a spectral gap

    # serialization ----------------------------------------------------------

    def to_dict(self) -> dict:
        d: dict = {"family": self.family, "modes": self.modes}
        if self.family == "exp_comb":
            d["gamma"] = self.gamma
        elif self.family == "poly_comb":
            d["beta"] = self.beta
        else:
            d["eigenvalues"] = [[v.real, v.imag] for v in self.custom]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumSpec":
        family = d.get("family")
        if family == "exp_comb":
            return cls.exp_comb(d["gamma"], d["modes"])
        if family == "poly_comb":
            return cls.poly_comb(d["beta"], d["modes"])
        if family == "custom":
            vals = [complex(re, im) for re, im in d["eigenvalues"]]
            spec = cls.from_eigenvalues(vals)
            if "modes" in d and d["modes"] != spec.modes:
                raise SpectrumError("modes does not match the number of custom eigenvalues")
            return spec
        raise SpectrumError(f"unknown spectrum family {family!r}")

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SpectrumSpec":
        return cls.from_dict(json.loads(text))

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def __repr__(self):
        if self.family == "exp_comb":
            return f"ExpComb(gamma={self.gamma}, K={self.modes})"
        if self.family == "poly_comb":
            return f"PolyComb(beta={self.beta}, K={self.modes})"
        return f"Custom({list(self.custom)})"


def eigenvalues(spec: SpectrumSpec) -> list[complex]:
    return [complex(v) for v in spec.eigenvalues]


@dataclass(frozen=True)
class SpectralMarginCheck:
    C: float
    delta: float
    beta: float
    failures: tuple[tuple[int, complex], ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def check_poly_condition(spec: SpectrumSpec, beta: float, C: float, delta: float) -> SpectralMarginCheck:
    """Check ``|Im l| >= C / |Re l|**(1/beta)`` for every ``l`` with ``Re l >= -delta``."""
    if beta <= 0 or C <= 0 or delta <= 0:
        raise ValueError("beta, C and delta must be positive")
    lam = spec.eigenvalues
    near_axis = lam.real >= -delta
    margin = np.abs(lam.imag) * np.abs(lam.real) ** (1.0 / beta)
    fails = near_axis & (margin < C * (1.0 - _MARGIN_RTOL))
    idx = np.flatnonzero(fails)
    return SpectralMarginCheck(
        C=C, delta=delta, beta=beta,
        failures=tuple((int(i) + 1, complex(lam[i])) for i in idx),
    )
