"""The acceptance suite: one function per criterion, each returning a :class:`CriterionResult`.

Shared by ``semigroup-lab verify --suite paper`` and ``tests/test_acceptance.py``.
Thresholds are fixed here and are never tuned to make a criterion pass.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bcalculus as bc
from . import lyapunov as ly
from . import matrix_backend as mb
from .crank_nicolson import StepsizeSchedule, cn_constant_maximizer, cn_branch_limit, cn_norm_curve, cn_norm_curves
from .curves import NormCurve, dyadic_grid, integer_dyadic_grid
from .decay_analysis import DecayModel, check_order, fit_power, liminf_check
from .spectral_calculus import KernelKind, kernel_norm, norm_curve, optimality_witness
from .spectrum import SpectrumSpec

INV_FRAC_1 = KernelKind("inv_semigroup_frac", 1.0)


@dataclass
class Check:
    label: str
    passed: bool
    measured: str


@dataclass
class CriterionResult:
    number: int
    name: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0
    budget: float = math.inf

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, label: str, passed: bool, measured: str) -> None:
        self.checks.append(Check(label, bool(passed), measured))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.1f}s)"

    def report(self) -> str:
        lines = [self.line()]
        for c in self.checks:
            lines.append(f"    {'ok  ' if c.passed else 'FAIL'} {c.label}: {c.measured}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed, "seconds": self.seconds,
                "checks": [{"label": c.label, "passed": c.passed, "measured": c.measured} for c in self.checks]}


def _timed(number: int, name: str, budget: float):
    def wrap(fn):
        def run() -> CriterionResult:
            res = CriterionResult(number, name, budget=budget)
            start = time.perf_counter()
            fn(res)
            res.seconds = time.perf_counter() - start
            res.add(f"runtime < {budget:g}s", res.seconds < budget, f"{res.seconds:.2f}s")
            return res

        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


def _in(x: float, lo: float, hi: float) -> bool:
    return lo <= x <= hi


@_timed(1, "exact ExpComb witnesses", 1.0)
def criterion_1(res: CriterionResult) -> None:
    spec = SpectrumSpec.exp_comb(1.0, 64)
    val, k = kernel_norm(spec, INV_FRAC_1, 1.0)
    exact = 1 / math.sqrt(2 * math.e)
    res.add("t=1 equals 1/sqrt(2e) within 1e-12", abs(val - exact) <= 1e-12, f"|diff|={abs(val - exact):.2e}, k={k}")
    for kk in (2, 5, 10):
        t, w = optimality_witness(spec, 1.0, kk)
        val, k = kernel_norm(spec, INV_FRAC_1, t)
        res.add(f"witness k={kk} (t={t:g}) within 1e-12", abs(val - w) <= 1e-12 and k == kk,
                f"|diff|={abs(val - w):.2e}, argmax k={k}")


@_timed(2, "exponential-case rate t^(-alpha/2)", 10.0)
def criterion_2(res: CriterionResult) -> None:
    spec = SpectrumSpec.exp_comb(1.0, 10**5)
    grid = dyadic_grid(1.0, 1e6)
    for alpha, (lo, hi) in ((1.0, (0.45, 0.55)), (2.0, (0.95, 1.05))):
        curve = norm_curve(spec, KernelKind("inv_semigroup_frac", alpha), grid)
        fit = fit_power(curve, (1e2, 1e6))
        res.add(f"alpha={alpha:g}: p in [{lo}, {hi}]", _in(fit.exponent, lo, hi),
                f"p={fit.exponent:.5f}, R2={fit.r_squared:.6f}")
        res.add(f"alpha={alpha:g}: maximizer below K/2", curve.tail_safe, f"max k={int(curve.argmax.max())}")


def poly_floor(alpha: float = 1.0) -> float:
    return 2 ** (-alpha / 2) * (alpha / (3 * math.e)) ** (alpha / 3)


@_timed(3, "polynomial-case rate t^(-alpha/(2+beta))", 10.0)
def criterion_3(res: CriterionResult) -> None:
    spec = SpectrumSpec.poly_comb(1.0, 10**4)
    curve = norm_curve(spec, INV_FRAC_1, dyadic_grid(1.0, 1e8))
    fit = fit_power(curve, (1e2, 1e8))
    res.add("p in [0.30, 0.37]", _in(fit.exponent, 0.30, 0.37), f"p={fit.exponent:.5f}")
    ks = np.unique(np.round(np.geomspace(4, 600, 40)).astype(int))
    times = [optimality_witness(spec, 1.0, int(k))[0] for k in ks]
    wcurve = norm_curve(spec, INV_FRAC_1, times)
    floor = poly_floor(1.0)
    verdict = liminf_check(wcurve, 1 / 3, floor)
    res.add(f"liminf t^(1/3) norm >= {floor:.6f} at witnesses", verdict.holds, f"min={verdict.minimum:.6f}")


BRANCH_CASES = ((1.5, DecayModel.power_law(0.5), (1e2, 1e6)),
                (2.0, DecayModel.log_over_power(1.0), (math.e, 1e4)),
                (3.0, DecayModel.power_law(1.5), (1e2, 1e6)))
ENVELOPE_GRID = tuple((t, a) for t in (0.5, 1.0, 10.0, 100.0, 1000.0) for a in (1.0, 2.0))


@_timed(4, "B0-norm lemma quantities", 120.0)
def criterion_4(res: CriterionResult) -> None:
    f2 = bc.F_alpha(math.e, 2.0)
    f2a = bc.F_alpha_analytic(math.e, 2.0)
    res.add("F_2(e) = 1/e within 1e-6 (quadrature)", abs(f2 - 1 / math.e) <= 1e-6, f"|diff|={abs(f2 - 1 / math.e):.2e}")
    res.add("F_2(e) quadrature vs analytic within 1e-6", abs(f2 - f2a) <= 1e-6, f"|diff|={abs(f2 - f2a):.2e}")
    for alpha, model, (lo, hi) in BRANCH_CASES:
        grid = dyadic_grid(lo, hi, 2)
        vals = np.array([bc.F_alpha(t, alpha) for t in grid])
        curve = NormCurve("continuous", grid, vals, np.full(grid.size, -1), {})
        v = check_order(curve, model)
        res.add(f"F_{alpha:g} vs {model.name}: finite, trend <= 1.05", v.finite and v.trend <= 1.05,
                f"constant={v.constant:.4g}, trend={v.trend:.4f}")
    r = bc.b0_norm(bc.FunctionFamily.rpow(1.0))
    res.add("b0(Rpow(1)) = 1 within 1e-8", abs(r.b0 - 1) <= 1e-8, f"|diff|={abs(r.b0 - 1):.2e}")
    worst = -math.inf
    for t, a in ENVELOPE_GRID:
        b = bc.b0_norm(bc.FunctionFamily.fta(t, a))
        worst = max(worst, b.b0 - b.envelope)
    res.add("b0(Fta) <= t F_(a+2) + a F_(a+1) + 1e-6 on 5x2 grid", worst <= 1e-6, f"max(b0 - envelope)={worst:.3g}")
    grid = dyadic_grid(10.0, 1e4)
    for a in (1.0, 2.0):
        scaled = np.array([t ** (a / 2) * bc.b0_norm(bc.FunctionFamily.fta(t, a)).b0 for t in grid])
        curve = NormCurve("continuous", grid, scaled, np.full(grid.size, -1), {})
        v = check_order(curve, DecayModel.power_law(0.0))
        res.add(f"t^(a/2) b0 bounded, a={a:g}: finite, trend <= 1.05", v.finite and v.trend <= 1.05,
                f"max={v.constant:.4f}, trend={v.trend:.4f}")


NONNORMAL_N = np.array([[-0.5, 0.6, 0.0, 0.2],
                        [0.0, -1.0, 0.6, 0.0],
                        [0.0, 0.0, -1.5, 0.6],
                        [0.0, 0.0, 0.0, -2.0]])


def nonnormal_test_matrix() -> np.ndarray:
    """``A = -I + N`` where ``N + N^T`` is negative definite, so ``||e^{At}|| <= e^{-t}``."""
    return -np.eye(4) + NONNORMAL_N


def _fta_reference(A: np.ndarray, t: float, alpha: float) -> np.ndarray:
    return mb.expm(np.linalg.inv(A), t) @ mb.frac_power(A, -alpha)


@_timed(5, "matrix B-calculus evaluation", 120.0)
def criterion_5(res: CriterionResult) -> None:
    f = bc.FunctionFamily.fta(1.0, 1.0)
    b0 = bc.b0_norm(f).b0
    for label, A in (("diag(-1,-2)", np.diag([-1.0, -2.0])), ("4x4 non-normal", nonnormal_test_matrix())):
        B = -A - np.eye(A.shape[0])
        F = mb.bcalc_apply(f, B)
        ref = _fta_reference(A, 1.0, 1.0)
        err = float(np.max(np.abs(F - ref)))
        res.add(f"{label}: matches e^(A^-1) (-A)^-1 within 1e-6", err <= 1e-6, f"max |diff|={err:.2e}")
        K = mb.semigroup_bound(B)
        bound = abs(f.at_infinity) + 2 * K * K * b0
        nrm = float(np.linalg.norm(F, 2))
        res.add(f"{label}: ||f(B)|| <= |f(inf)| + 2K^2 b0", nrm <= bound, f"{nrm:.4f} <= {bound:.4f} (K={K:.4f})")
    ts = np.geomspace(1e-2, 50, 60)
    A = nonnormal_test_matrix()
    worst = max(np.linalg.norm(mb.expm(A, t), 2) * math.exp(t) for t in ts)
    res.add("4x4 test matrix: ||e^(At)|| <= e^(-t)", worst <= 1 + 1e-12, f"max e^t ||e^(At)||={worst:.6f}")


def random_normal_matrix(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    lam = -rng.uniform(0.2, 3.0, n) + 1j * rng.uniform(-4, 4, n)
    return Q @ np.diag(lam) @ Q.conj().T, lam


@_timed(6, "Lyapunov oracles", 60.0)
def criterion_6(res: CriterionResult) -> None:
    A, lam = random_normal_matrix(8, seed=7)
    P = mb.lyapunov_solve(A)
    resid = mb.lyapunov_residual(A, 0.0, P)
    res.add("8x8 normal: residual <= 1e-10", resid <= 1e-10, f"residual={resid:.2e}")
    Pq = mb.lyapunov_quadrature(A)
    rel = float(np.linalg.norm(P - Pq) / np.linalg.norm(P))
    res.add("8x8 normal: Kronecker vs quadrature 1e-8", rel <= 1e-8, f"rel diff={rel:.2e}")
    worst = 0.0
    for spec, seed in ((SpectrumSpec.exp_comb(1.0, 16), 1), (SpectrumSpec.poly_comb(1.0, 16), 2),
                       (SpectrumSpec.from_eigenvalues(random_normal_matrix(16, seed=11)[1]), 3)):
        x = ly.ModeVector.random(spec, seed)
        for xi in (0.01, 0.3, 2.0):
            for closed, oracle in ((ly.p_form, ly.p_form_quadrature), (ly.q_form, ly.q_form_quadrature)):
                a, b = closed(spec, xi, x), oracle(spec, xi, x)
                worst = max(worst, abs(a - b) / abs(b))
    res.add("p_form/q_form vs quadrature 1e-8 on 16-mode vectors", worst <= 1e-8, f"max rel diff={worst:.2e}")
    xi = 2.0 ** np.arange(-20, 11)
    for spec in (SpectrumSpec.exp_comb(1.0, 4096), SpectrumSpec.poly_comb(1.0, 4096)):
        for p in (0.0, 1.0, 2.0):
            x = ly.ModeVector.power_decay(spec, p)
            v = ly.shifted_inverse_integral_check(spec, 1.0, xi, x)
            res.add(f"shifted inverse {spec.family}, x_k=k^-{p:g}: constant <= 1 + 1e-12",
                    v.finite and v.constant <= 1 + 1e-12, f"constant={v.constant:.12f}")


@_timed(7, "Crank-Nicolson constant stepsize", 30.0)
def criterion_7(res: CriterionResult) -> None:
    N = 10**6
    spec = SpectrumSpec.exp_comb(1.0, 8192)
    curve = cn_norm_curve(spec, StepsizeSchedule.constant(2.0), 1.0, N, integer_dyadic_grid(1, N, 2))
    fit = fit_power(curve, (1e2, 1e6))
    res.add("p in [0.45, 0.55] over n in [1e2, 1e6]", _in(fit.exponent, 0.45, 0.55), f"p={fit.exponent:.5f}")
    res.add("maximizer below K/2", curve.tail_safe, f"max k={int(curve.argmax.max())}")
    worst = max(v / cn_constant_maximizer(1.0, int(n))[1] for n, v in zip(curve.abscissa, curve.values))
    res.add("norm <= sqrt(f_n(w_n)) at every sample", worst <= 1 + 1e-12, f"max ratio={worst:.15f}")
    w, _ = cn_constant_maximizer(1.0, N)
    lim = cn_branch_limit(1.0, N)
    res.add("|branch limit - 1/e| <= 1e-3 at n=1e6", abs(lim - 1 / math.e) <= 1e-3, f"|diff|={abs(lim - 1 / math.e):.2e}")
    res.add("|n/w_n - 1/4| <= 1e-3 at n=1e6", abs(N / w - 0.25) <= 1e-3, f"|diff|={abs(N / w - 0.25):.2e}")


CN_RANDOM = StepsizeSchedule.uniform_random(0.5, 4.0, seed=42)


@_timed(8, "Crank-Nicolson variable stepsizes", 180.0)
def criterion_8(res: CriterionResult) -> None:
    N = 10**5
    samples = integer_dyadic_grid(1, N, 4)
    window = (1e2, 1e5)
    exp_1, exp_34 = cn_norm_curves(SpectrumSpec.exp_comb(1.0, 4096), CN_RANDOM, (1.0, 0.75), N, samples)
    v = check_order(exp_1, DecayModel.power_log_half(), window)
    res.add("ExpComb alpha=1 vs sqrt(log n/n): finite, trend <= 1.05", v.finite and v.trend <= 1.05,
            f"constant={v.constant:.4g}, trend={v.trend:.4f}")
    poly = cn_norm_curve(SpectrumSpec.poly_comb(1.0, 4096), CN_RANDOM, 1.0, N, samples)
    fit = fit_power(poly, window)
    res.add("PolyComb beta=1 alpha=1: p in [0.28, 0.38]", _in(fit.exponent, 0.28, 0.38), f"p={fit.exponent:.5f}")
    fit = fit_power(exp_34, window)
    res.add("ExpComb alpha=3/4: p in [0.20, 0.30]", _in(fit.exponent, 0.20, 0.30),
            f"p={fit.exponent:.5f} (alpha/2 = 0.375)")
    for c in (exp_1, poly, exp_34):
        res.add(f"{c.meta['kernel']} on {c.meta['spectrum']['family']}: maximizer below K/2", c.tail_safe,
                f"max k={int(c.argmax.max())}")


@_timed(9, "bounded inverse semigroup on PolyComb", 30.0)
def criterion_9(res: CriterionResult) -> None:
    r = ly.inverse_semigroup_sup(1.0, dyadic_grid(1.0, 1e8))
    res.add("sup finite", r.finite, f"sup={r.sup_large:.6f}")
    res.add("< 1% change for K 2048 -> 4096", r.relative_change < 0.01, f"change={r.relative_change:.2e}")
    xi = 2.0 ** -np.arange(2, 31)
    consts = []
    for K in (4096, 8192):
        spec = SpectrumSpec.poly_comb(1.0, K)
        v = ly.step1_xi_log_check(spec, xi, ly.ModeVector.power_decay(spec, 2.0))
        consts.append(v.constant)
        res.add(f"step-1 check K={K}: finite, trend <= 1.05", v.finite and v.trend <= 1.05,
                f"constant={v.constant:.6f}, trend={v.trend:.4f}")
    drift = abs(consts[1] - consts[0]) / consts[0]
    res.add("step-1 constant drift < 1% when K doubles", drift < 0.01, f"drift={drift:.2e}")


PZ_R_GRID = 1.0 - 2.0 ** -np.arange(1, 11)


@_timed(10, "discrete resolvent-type probe", 60.0)
def criterion_10(res: CriterionResult) -> None:
    consts = []
    for K in (512, 1024, 2048):
        spec = SpectrumSpec.exp_comb(1.0, K)
        x0 = ly.ModeVector.power_decay(spec, 2.0)
        y = ly.ModeVector.power_decay(spec, 1.0)
        v = ly.pz_inequality_probe(spec, CN_RANDOM, x0, y, PZ_R_GRID, 4096)
        consts.append(v.constant)
        res.add(f"K={K}: finite", v.finite, f"constant={v.constant:.6f}, trend={v.trend:.4f}")
    drift = (max(consts) - min(consts)) / min(consts)
    res.add("< 5% drift across K in {512, 1024, 2048}", drift < 0.05, f"drift={drift:.2e}")


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_suite(numbers=None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if numbers is None else numbers
    return [CRITERIA[n]() for n in numbers]
