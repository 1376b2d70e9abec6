"""Lyapunov quadratic forms on diagonal models and the inequality probes built on them.

For a normal model with eigenvalues ``lambda_k``:

* ``<x, P(xi) x> = sum |x_k|^2 / (2 (xi - Re lambda_k))``
* ``<x, Q(xi) x> = sum |x_k|^2 / (2 (xi - Re(1/lambda_k)))``

which are the per-mode values of ``int_0^inf e^{-2 xi t} ||e^{Gt} x||^2 dt`` for
``G = A`` and ``G = A^{-1}``. The quadrature versions below exist only as
oracles for these closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crank_nicolson import StepsizeSchedule
from .decay_analysis import FitError, InequalityVerdict, window_trend
from .quadrature import quad
from .spectral_calculus import KernelKind, norm_curve
from .spectrum import SpectrumSpec


@dataclass(frozen=True)
class ModeVector:
    spec: SpectrumSpec
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size != self.spec.modes:
            raise ValueError(f"expected {self.spec.modes} coefficients, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def power_decay(cls, spec: SpectrumSpec, p: float) -> "ModeVector":
        """``x_k = k^{-p}``."""
        k = np.arange(1, spec.modes + 1, dtype=float)
        return cls(spec, k**-p)

    @classmethod
    def random(cls, spec: SpectrumSpec, seed: int) -> "ModeVector":
        rng = np.random.default_rng(seed)
        return cls(spec, rng.standard_normal(spec.modes) + 1j * rng.standard_normal(spec.modes))

    @property
    def weights(self) -> np.ndarray:
        return np.abs(self.coeffs) ** 2

    def norm(self) -> float:
        return float(math.sqrt(np.sum(self.weights)))

    def frac_norm(self, alpha: float) -> float:
        """``||(-A)^alpha x||``."""
        return float(math.sqrt(np.sum(self.spec.abs_sq**alpha * self.weights)))


@dataclass(frozen=True)
class RFactor:
    r: float
    tau_min: float
    tau_max: float

    def __post_init__(self):
        if not 0 < self.r < 1:
            raise ValueError("r must lie in (0, 1)")
        if not 0 < self.tau_min <= self.tau_max:
            raise ValueError("need 0 < tau_min <= tau_max")

    @property
    def xi(self) -> float:
        r2 = self.r * self.r
        return (1 - r2) / (2 * (r2 + 1))


def _check_vector(spec, x) -> ModeVector:
    if isinstance(x, ModeVector):
        if x.spec != spec:
            raise ValueError("mode vector belongs to a different spectrum")
        return x
    return ModeVector(spec, x)


def p_form(spec: SpectrumSpec, xi: float, x) -> float:
    x = _check_vector(spec, x)
    if xi < 0:
        raise ValueError("xi must be nonnegative")
    if xi == 0 and not spec.is_exponentially_stable:
        # sum |x_k|^2/(2|Re l_k|) may converge, but nothing controls the tail uniformly
        tail = float(np.sum(x.weights[spec.modes // 2:] / (-2 * spec.eigenvalues.real[spec.modes // 2:])))
        raise ValueError(f"xi = 0 needs an exponentially stable spectrum (upper-half tail sum {tail:.3g})")
    return float(np.sum(x.weights / (2 * (xi - spec.eigenvalues.real))))


def q_form(spec: SpectrumSpec, xi: float, x) -> float:
    x = _check_vector(spec, x)
    if xi <= 0:
        raise ValueError("xi must be positive")
    inv_re = spec.eigenvalues.real / spec.abs_sq
    return float(np.sum(x.weights / (2 * (xi - inv_re))))


def r_form(spec: SpectrumSpec, tau_min: float, tau_max: float, r: float, x) -> float:
    """``(2/tau_min) P(xi_r/tau_max) + 2 tau_max Q(tau_min xi_r)`` as a quadratic form."""
    f = RFactor(r, tau_min, tau_max)
    return (2 / tau_min) * p_form(spec, f.xi / tau_max, x) + 2 * tau_max * q_form(spec, tau_min * f.xi, x)


def _energy_quadrature(rates_fn, xi: float) -> float:
    val, _ = quad(lambda t: math.exp(-2 * xi * t) * rates_fn(t), 0.0, math.inf, epsrel=1e-12, epsabs=0.0)
    return val


def p_form_quadrature(spec: SpectrumSpec, xi: float, x) -> float:
    """``int_0^inf e^{-2 xi t} ||e^{At} x||^2 dt`` by quadrature."""
    x = _check_vector(spec, x)
    lam, c = spec.eigenvalues, x.coeffs
    return _energy_quadrature(lambda t: float(np.sum(np.abs(np.exp(lam * t) * c) ** 2)), xi)


def q_form_quadrature(spec: SpectrumSpec, xi: float, x) -> float:
    """``int_0^inf e^{-2 xi t} ||e^{A^{-1} t} x||^2 dt`` by quadrature."""
    x = _check_vector(spec, x)
    inv, c = 1.0 / spec.eigenvalues, x.coeffs
    return _energy_quadrature(lambda t: float(np.sum(np.abs(np.exp(inv * t) * c) ** 2)), xi)


# --- probes -----------------------------------------------------------------


def _verdict(probe, grid_desc, x, values, ascending) -> InequalityVerdict:
    values = np.asarray(values, float)
    finite = bool(np.all(np.isfinite(values)))
    try:
        trend = window_trend(x, values, ascending)
    except FitError:
        # too few points for two octaves; the constant is still meaningful
        trend = math.nan
    return InequalityVerdict(probe, grid_desc, float(np.max(values)), finite, trend)


def _describe_grid(g) -> str:
    g = np.asarray(g, float)
    return f"{g.size} points in [{g.min():.3g}, {g.max():.3g}]"


def inner_products(spec: SpectrumSpec, sched: StepsizeSchedule, x0, y, N: int) -> np.ndarray:
    """``<y, x_n>`` for ``n = 0..N`` on the diagonal model."""
    x0 = _check_vector(spec, x0)
    y = _check_vector(spec, y)
    lam = spec.eigenvalues
    taus = sched.taus(N)
    state = x0.coeffs.copy()
    yc = y.coeffs.conj()
    out = np.empty(N + 1, dtype=complex)
    out[0] = yc @ state
    for n, tau in enumerate(taus, start=1):
        z = 0.5 * tau * lam
        state *= (1 + z) / (1 - z)
        out[n] = yc @ state
    return out


def pz_constants(spec: SpectrumSpec, sched: StepsizeSchedule, x0, y, r_grid, N: int) -> np.ndarray:
    """Per-r values of ``max_n (n+1) r^n |<y, x_n>| sqrt(1-r) / (||y|| sqrt(<x0, R(r) x0>))``."""
    x0 = _check_vector(spec, x0)
    y = _check_vector(spec, y)
    r_grid = np.asarray(r_grid, float)
    ip = np.abs(inner_products(spec, sched, x0, y, N))
    n = np.arange(N + 1)
    with np.errstate(divide="ignore"):
        log_ip = np.log(ip)
    ynorm = y.norm()
    consts = []
    for r in r_grid:
        R = r_form(spec, sched.tau_min, sched.tau_max, r, x0)
        logs = np.log1p(n) + n * math.log(r) + log_ip
        lhs = math.exp(float(np.max(logs)))
        consts.append(lhs * math.sqrt(1 - r) / (ynorm * math.sqrt(R)))
    return np.array(consts)


def pz_inequality_probe(spec: SpectrumSpec, sched: StepsizeSchedule, x0, y, r_grid, N: int) -> InequalityVerdict:
    """Measured constant in ``|(n+1) r^n <y, x_n>| <= M ||y|| sqrt(<x0, R(r) x0>) / sqrt(1-r)``."""
    r_grid = np.asarray(r_grid, float)
    consts = pz_constants(spec, sched, x0, y, r_grid, N)
    # asymptotic direction is r -> 1, i.e. 1 - r -> 0
    return _verdict("pz_inequality", f"r: {_describe_grid(r_grid)}, N={N}", 1 - r_grid, consts, ascending=False)


def q_bound_check(spec: SpectrumSpec, alpha: float, xi_grid, x, beta: float | None = None) -> InequalityVerdict:
    xi_grid = np.asarray(xi_grid, float)
    name, vals = q_bound_values(spec, alpha, xi_grid, x, beta)
    return _verdict(name, f"xi: {_describe_grid(xi_grid)}", xi_grid, vals, ascending=False)


def q_bound_values(spec: SpectrumSpec, alpha: float, xi_grid, x, beta: float | None = None):
    """Probe name and per-xi ratios for the small-xi bounds on ``<x, Q(xi) x>``.

    Without ``beta`` (exponentially stable case): ``xi^{1-alpha} Q / ||(-A)^alpha x||^2``
    for ``0 < alpha < 1`` and ``Q / (log(1/xi) ||Ax||^2)`` for ``alpha = 1``.
    With ``beta`` (normal polynomially stable case) the exponent is
    ``1 - 2 alpha/(2+beta)``, and ``alpha = 1 + beta/2`` selects the log form.
    """
    xi_grid = np.asarray(xi_grid, float)
    if np.any((xi_grid <= 0) | (xi_grid >= 1)):
        raise ValueError("xi grid must lie in (0, 1)")
    x = _check_vector(spec, x)
    cap = 1.0 if beta is None else 1 + beta / 2
    if not 0 < alpha <= cap:
        raise ValueError(f"alpha must lie in (0, {cap:g}]")
    denom = x.frac_norm(alpha) ** 2
    q = np.array([q_form(spec, xi, x) for xi in xi_grid])
    if alpha == cap:
        if np.any(xi_grid >= 0.5):
            raise ValueError("the logarithmic bound needs xi < 1/2")
        vals = q / (np.log(1 / xi_grid) * denom)
        name = "q_bound_log"
    else:
        e = 1 - alpha if beta is None else 1 - 2 * alpha / (2 + beta)
        vals = xi_grid**e * q / denom
        name = f"q_bound_pow:{e:g}"
    return name, vals


def shifted_inverse_lhs(spec: SpectrumSpec, gamma: float, xi: float, x) -> float:
    """``int_0^inf ||e^{(gA - xi)^{-1} t} (gA - xi)^{-1} x||^2 dt`` in closed form."""
    x = _check_vector(spec, x)
    return float(np.sum(x.weights / (2 * (xi - gamma * spec.eigenvalues.real))))


def shifted_inverse_quadrature(spec: SpectrumSpec, gamma: float, xi: float, x) -> float:
    x = _check_vector(spec, x)
    mu = gamma * spec.eigenvalues - xi
    inv, c = 1.0 / mu, x.coeffs / mu
    val, _ = quad(lambda t: float(np.sum(np.abs(np.exp(inv * t) * c) ** 2)), 0.0, math.inf,
                  epsrel=1e-12, epsabs=0.0)
    return val


def shifted_inverse_integral_check(spec: SpectrumSpec, gamma: float, xi_grid, x) -> InequalityVerdict:
    """Measured ``sup_xi 2 xi LHS / ||x||^2``; at most ``K^2 = 1`` for normal contractive models."""
    xi_grid = np.asarray(xi_grid, float)
    vals = shifted_inverse_values(spec, gamma, xi_grid, x)
    return _verdict("shifted_inverse", f"xi: {_describe_grid(xi_grid)}", xi_grid, vals, ascending=False)


def shifted_inverse_values(spec: SpectrumSpec, gamma: float, xi_grid, x) -> np.ndarray:
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    x = _check_vector(spec, x)
    xi_grid = np.asarray(xi_grid, float)
    if np.any(xi_grid <= 0):
        raise ValueError("xi must be positive")
    return np.array([shifted_inverse_lhs(spec, gamma, xi, x) * 2 * xi / x.norm() ** 2 for xi in xi_grid])


STEP1_DELTA0 = 0.5


def step1_xi_log_check(spec: SpectrumSpec, xi_grid, x) -> InequalityVerdict:
    """Measured ``sup xi |log xi|^{2 beta} <x, P(xi) x> / ||Ax||^2`` over ``xi < 1/2``."""
    xi_grid = np.asarray(xi_grid, float)
    vals = step1_values(spec, xi_grid, x)
    return _verdict("step1_xi_log", f"xi: {_describe_grid(xi_grid)}", xi_grid, vals, ascending=False)


def step1_values(spec: SpectrumSpec, xi_grid, x) -> np.ndarray:
    if spec.family != "poly_comb":
        raise ValueError("step-1 check is defined for PolyComb spectra")
    xi_grid = np.asarray(xi_grid, float)
    if np.any((xi_grid <= 0) | (xi_grid >= STEP1_DELTA0)):
        raise ValueError(f"xi grid must lie in (0, {STEP1_DELTA0})")
    x = _check_vector(spec, x)
    b = spec.beta
    denom = x.frac_norm(1.0) ** 2
    return np.array([xi * abs(math.log(xi)) ** (2 * b) * p_form(spec, xi, x) / denom for xi in xi_grid])


def gautschi_check(tau_grid) -> InequalityVerdict:
    """Quadrature check of ``int_tau^inf e^{-t}/t dt <= e^{-tau} log(1 + 1/tau)``; constant is the max ratio."""
    tau_grid = np.asarray(tau_grid, float)
    ratios = []
    for tau in tau_grid:
        # substitute t = tau + s to keep the integrand O(1) near the left end
        e1, _ = quad(lambda s: math.exp(-s) / (tau + s), 0.0, math.inf, epsrel=1e-12, epsabs=0.0)
        ratios.append(e1 / math.log1p(1 / tau))
    return _verdict("gautschi", f"tau: {_describe_grid(tau_grid)}", tau_grid, ratios, ascending=True)


@dataclass(frozen=True)
class BoundedSupResult:
    sup_small: float
    sup_large: float
    modes: tuple[int, int]

    @property
    def relative_change(self) -> float:
        return abs(self.sup_large - self.sup_small) / self.sup_small

    @property
    def finite(self) -> bool:
        return math.isfinite(self.sup_small) and math.isfinite(self.sup_large)


def inverse_semigroup_sup(beta: float, grid, modes=(2048, 4096)) -> BoundedSupResult:
    """``sup_t ||e^{A^{-1} t} A^{-1}||`` on PolyComb(beta) for two truncations."""
    kind = KernelKind("inv_semigroup_frac", 1.0)
    sups = []
    for K in modes:
        c = norm_curve(SpectrumSpec.poly_comb(beta, K), kind, grid)
        sups.append(float(np.max(c.values)))
    return BoundedSupResult(sups[0], sups[1], tuple(modes))
