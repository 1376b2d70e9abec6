import math

import numpy as np
import pytest

from semigroup_lab.quadrature import InnerMaxError, QuadratureError, golden_max, quad, quad_vec, scan_then_golden


def test_quad_semi_infinite():
    v, _ = quad(lambda x: math.exp(-x), 0, math.inf)
    assert abs(v - 1) < 1e-12


def test_quad_reports_failure():
    with pytest.raises(QuadratureError):
        quad(lambda x: 1 / x, 0, 1, limit=20)


def test_quad_vec():
    v, _ = quad_vec(lambda x: np.array([x, x * x]), 0, 1)
    np.testing.assert_allclose(v, [0.5, 1 / 3], rtol=1e-12)


def test_golden_max():
    x, v = golden_max(lambda x: -(x - 0.3) ** 2, 0, 1)
    assert abs(x - 0.3) < 1e-8 and abs(v) < 1e-14


def test_scan_then_golden_multimodal():
    f = lambda x: np.maximum(np.exp(-(x - 1) ** 2), 2 * np.exp(-((x - 4) ** 2) * 10))
    x, v = scan_then_golden(f, 0, 6)
    assert abs(x - 4) < 1e-5 and abs(v - 2) < 1e-9


def test_scan_then_golden_unbracketed():
    with pytest.raises(InnerMaxError):
        scan_then_golden(lambda x: x, 0, 1)
