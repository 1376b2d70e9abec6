import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semigroup_lab.curves import dyadic_grid
from semigroup_lab.decay_analysis import fit_power
from semigroup_lab.spectral_calculus import (KernelKind, TruncationWarning, continuous_envelope, default_modes,
                                             kernel_norm, maximizer_index, norm_curve, optimality_witness)
from semigroup_lab.spectrum import SpectrumSpec

INV1 = KernelKind("inv_semigroup_frac", 1.0)


def brute(spec, kind, t):
    """Linear-domain maximum over modes, written independently of the log-domain evaluator."""
    vals = []
    for lam in spec.eigenvalues:
        inv = 1 / lam
        if kind.tag == "semigroup":
            v = abs(np.exp(t * lam))
        elif kind.tag == "inv_semigroup":
            v = abs(np.exp(t * inv))
        elif kind.tag == "inv_semigroup_frac":
            v = abs(np.exp(t * inv)) * abs(lam) ** -kind.alpha
        elif kind.tag == "semigroup_frac":
            v = abs(np.exp(t * lam)) * abs(lam) ** -kind.alpha
        else:
            v = abs(np.exp(t * lam)) / abs(1 - lam)
        vals.append(v)
    return max(vals), int(np.argmax(vals)) + 1


def test_exact_witness_t1():
    v, k = kernel_norm(SpectrumSpec.exp_comb(1.0, 64), INV1, 1.0)
    assert abs(v - 1 / math.sqrt(2 * math.e)) <= 1e-12 and k == 1


def test_t0_alpha2():
    v, k = kernel_norm(SpectrumSpec.exp_comb(1.0, 64), KernelKind("inv_semigroup_frac", 2.0), 0.0)
    assert v == pytest.approx(0.5, abs=1e-15) and k == 1


def test_t0_polycomb():
    v, k = kernel_norm(SpectrumSpec.poly_comb(1.0, 64), INV1, 0.0)
    assert v == pytest.approx(1 / math.sqrt(2), abs=1e-15) and k == 1


@pytest.mark.parametrize("g,a,t,expected", [(1, 1, 1, 0.4288819424803534), (1, 2, 10, 1 / (10 * math.e)),
                                            (2, 1, 100, math.sqrt(1 / (400 * math.e)))])
def test_continuous_envelope(g, a, t, expected):
    assert continuous_envelope(g, a, t) == pytest.approx(expected, rel=1e-14)


def test_envelope_threshold():
    with pytest.raises(ValueError):
        continuous_envelope(1.0, 1.0, 0.5)


def test_witness_expcomb():
    spec = SpectrumSpec.exp_comb(1.0, 64)
    assert optimality_witness(spec, 1.0, 1) == pytest.approx((1.0, 0.4288819424803534), rel=1e-14)
    t, v = optimality_witness(spec, 2.0, 2)
    assert t == 5.0 and v == pytest.approx(2 / (10 * math.e), rel=1e-14)


def test_witness_polycomb_k3():
    spec = SpectrumSpec.poly_comb(1.0, 64)
    t, lb = optimality_witness(spec, 1.0, 3)
    assert t == pytest.approx(9.0)
    # 2^{-1/2} (1/(27e))^{1/3}; the rounded decimal often quoted for it (0.1685) is off in the third digit
    assert lb == pytest.approx(2 ** -0.5 * (1 / (27 * math.e)) ** (1 / 3), rel=1e-14)
    assert lb == pytest.approx(0.168888, abs=1e-6)
    assert kernel_norm(spec, INV1, t)[0] >= lb


def test_witness_polycomb_beta_not_one():
    with pytest.raises(ValueError):
        optimality_witness(SpectrumSpec.poly_comb(2.0, 64), 1.0, 3)


def test_semigroup_curve():
    c = norm_curve(SpectrumSpec.exp_comb(1.0, 16), KernelKind("semigroup"), [0, 1, 2])
    np.testing.assert_allclose(c.values, [1, math.exp(-1), math.exp(-2)], rtol=1e-15)


def test_single_point_curve():
    spec = SpectrumSpec.exp_comb(1.0, 64)
    c = norm_curve(spec, INV1, [7.0])
    assert c.values[0] == kernel_norm(spec, INV1, 7.0)[0]


def test_monotone_past_first_witness():
    c = norm_curve(SpectrumSpec.exp_comb(1.0, 4096), INV1, 2.0 ** np.arange(0, 21))
    assert np.all(np.diff(c.values) <= 0)


def test_truncation_flag():
    spec = SpectrumSpec.exp_comb(1.0, 8)
    with pytest.warns(TruncationWarning):
        _, k = kernel_norm(spec, INV1, 1000.0)
    assert k > 4
    with pytest.warns(TruncationWarning):
        c = norm_curve(spec, INV1, [1.0, 1000.0])
    assert not c.tail_safe and not c.meta["tail_safe"]


def test_kernel_parse():
    assert KernelKind.parse("inv_frac:3/4") == KernelKind("inv_semigroup_frac", 0.75)
    assert KernelKind.parse("resolvent").tag == "semigroup_resolvent_shift"
    with pytest.raises(ValueError):
        KernelKind.parse("frac")


def test_default_modes_rule():
    K = default_modes("exp_comb", 1.0, 1e6)
    spec = SpectrumSpec.exp_comb(1.0, K)
    assert maximizer_index(spec, 1.0, 1e6) <= K / 2
    assert kernel_norm(spec, INV1, 1e6)[1] <= K / 2


def test_parallel_curve_bitwise_equal():
    spec = SpectrumSpec.poly_comb(1.0, 2048)
    g = dyadic_grid(1, 1e6)
    a = norm_curve(spec, INV1, g)
    b = norm_curve(spec, INV1, g, workers=3)
    np.testing.assert_array_equal(a.values, b.values)


kinds = st.sampled_from([KernelKind("semigroup"), KernelKind("inv_semigroup"), KernelKind("inv_semigroup_frac", 0.5),
                         KernelKind("inv_semigroup_frac", 2.0), KernelKind("semigroup_frac", 1.0),
                         KernelKind("semigroup_resolvent_shift")])
specs = st.one_of(st.builds(SpectrumSpec.exp_comb, st.floats(0.2, 3), st.integers(1, 40)),
                  st.builds(SpectrumSpec.poly_comb, st.floats(0.5, 2), st.integers(1, 40)))


@given(specs, kinds, st.floats(0, 50))
def test_matches_linear_domain_brute_force(spec, kind, t):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        v, _ = kernel_norm(spec, kind, t)
    ref, _ = brute(spec, kind, t)
    assert v == pytest.approx(ref, rel=1e-12, abs=1e-300)


@given(specs, kinds, st.floats(0, 100))
def test_nondecreasing_in_truncation(spec, kind, t):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        small = kernel_norm(spec, kind, t)[0]
        big = kernel_norm(spec.with_modes(spec.modes * 2), kind, t)[0]
    assert big >= small


@given(st.floats(0.3, 3), st.floats(0.25, 3), st.floats(0, 1e4))
def test_envelope_domination(gamma, alpha, extra):
    t = alpha * (gamma**2 + 1) / (2 * gamma) + extra
    spec = SpectrumSpec.exp_comb(gamma, 4096)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        v = kernel_norm(spec, KernelKind("inv_semigroup_frac", alpha), t)[0]
    assert v <= continuous_envelope(gamma, alpha, t) * (1 + 1e-12)


@given(st.floats(0.3, 3), st.floats(0.25, 3), st.integers(1, 300))
def test_equality_at_witnesses(gamma, alpha, k):
    spec = SpectrumSpec.exp_comb(gamma, 1024)
    t, exact = optimality_witness(spec, alpha, k)
    v = kernel_norm(spec, KernelKind("inv_semigroup_frac", alpha), t, warn=False)[0]
    assert v == pytest.approx(exact, rel=1e-12)
    assert t ** (alpha / 2) * v >= (alpha / (2 * math.e * gamma)) ** (alpha / 2) - 1e-12


@pytest.mark.parametrize("gamma", [0.5, 1.0, 3.0])
def test_exponent_independent_of_gamma(gamma):
    spec = SpectrumSpec.exp_comb(gamma, default_modes("exp_comb", 1.0, 1e6, gamma=gamma))
    fit = fit_power(norm_curve(spec, INV1, dyadic_grid(1, 1e6)), (1e2, 1e6))
    assert abs(fit.exponent - 0.5) <= 0.05
