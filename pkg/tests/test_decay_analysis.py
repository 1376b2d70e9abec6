import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semigroup_lab.bcalculus import F_alpha
from semigroup_lab.curves import NormCurve, dyadic_grid
from semigroup_lab.decay_analysis import DecayModel, FitError, check_order, fit_power, liminf_check, window_trend
from semigroup_lab.spectral_calculus import KernelKind, norm_curve
from semigroup_lab.spectrum import SpectrumSpec


def curve(x, v):
    x = np.asarray(x, float)
    return NormCurve("continuous", x, np.asarray(v, float), -np.ones(x.size, dtype=np.int64))


GRID = dyadic_grid(1, 1e6, 4)


def test_exact_power_law():
    f = fit_power(curve(GRID, 3 * GRID**-0.5))
    assert f.exponent == pytest.approx(0.5, abs=1e-12)
    assert f.r_squared == 1.0 and f.residual_max < 1e-12
    assert f.window == (10.0, 1e6) and f.samples >= 8


@given(st.floats(-2, 3), st.floats(1e-6, 1e6))
def test_fit_rescaling_invariance(p, scale):
    v = GRID**-p * (1 + 0.1 * np.sin(np.log(GRID)))
    a, b = fit_power(curve(GRID, v)), fit_power(curve(GRID, scale * v))
    assert b.exponent == pytest.approx(a.exponent, abs=1e-9)
    assert b.intercept - a.intercept == pytest.approx(math.log(scale), abs=1e-9)
    assert 0 <= a.r_squared <= 1


def test_fit_errors():
    with pytest.raises(FitError):
        fit_power(curve(GRID, GRID**-1), (1e5, 1e6))
    with pytest.raises(FitError):
        fit_power(curve(GRID, GRID**-1), (10, 10))
    v = GRID**-1.0
    v[-3] = 0
    with pytest.raises(FitError):
        fit_power(curve(GRID, v))


def test_burn_in_drops_lowest_decade():
    v = np.where(GRID < 10, 1.0, GRID**-1.0)
    assert fit_power(curve(GRID, v), (1, 1e6)).exponent == pytest.approx(1.0, abs=1e-12)
    assert abs(fit_power(curve(GRID, v), (1, 1e6), burn_in=False).exponent - 1.0) > 0.05


def test_check_order_identity():
    m = DecayModel.power_law(0.7)
    v = check_order(curve(GRID, m(GRID)), m)
    assert v.constant == pytest.approx(1.0) and v.trend == pytest.approx(1.0) and v.finite


@pytest.mark.parametrize("p", [0.25, 0.5, 1.0, 2.0])
def test_check_order_detects_wrong_model(p):
    c = curve(GRID, 2 * GRID**-p)
    assert check_order(c, DecayModel.power_law(p + 0.1)).trend > 1
    assert check_order(c, DecayModel.power_law(p)).trend <= 1 + 1e-6


def test_f2_log_over_power():
    t = dyadic_grid(4, 1e4, 4)
    c = curve(t, [F_alpha(x, 2.0) for x in t])
    v = check_order(c, DecayModel.log_over_power(1.0), (math.e, 1e4))
    assert v.finite and v.trend <= 1.05


def test_expcomb_fit_window():
    spec = SpectrumSpec.exp_comb(1.0, 4096)
    c = norm_curve(spec, KernelKind("inv_semigroup_frac", 1.0), dyadic_grid(1, 1e6, 4))
    assert 0.45 <= fit_power(c, (1e2, 1e6)).exponent <= 0.55


def test_liminf_cases():
    v = liminf_check(curve(GRID, GRID**-0.5), 0.5, 1.0)
    assert v.minimum == pytest.approx(1.0) and v.holds
    assert not liminf_check(curve(GRID, 0.5 * GRID**-0.5), 0.5, 0.6).holds
    with pytest.raises(FitError):
        liminf_check(curve([1.0, 2.0], [1.0, 0.5]), 0.5, 0.1)


def test_expcomb_liminf_at_witnesses():
    spec = SpectrumSpec.exp_comb(1.0, 4096)
    k = np.arange(30, 1500, 37)
    t = (1 + k**2) / 2.0
    c = norm_curve(spec, KernelKind("inv_semigroup_frac", 1.0), t)
    v = liminf_check(c, 0.5, math.sqrt(1 / (2 * math.e)))
    assert v.holds


def test_window_trend_direction_and_sparse():
    x = np.array([1, 2, 3, 4, 8.0])
    assert window_trend(x, [1, 1, 1, 2, 4]) == pytest.approx(4.0)
    assert window_trend(1 / x, [1, 1, 1, 2, 4], ascending=False) == pytest.approx(4.0)
    with pytest.raises(FitError):
        window_trend([1.0, 100.0], [1, 1])


@pytest.mark.parametrize("text,model", [("power:0.5", DecayModel.power_law(0.5)), ("powerlog", DecayModel.power_log_half()),
                                        ("logpow:2", DecayModel.log_power(2)), ("logover", DecayModel.log_over_power())])
def test_model_parse(text, model):
    assert DecayModel.parse(text) == model
    assert np.all(model(np.array([2.0, 10.0, 1e6])) > 0)


def test_log_models_need_t_above_one():
    with pytest.raises(FitError):
        DecayModel.power_log_half()(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        DecayModel.parse("cubic")
