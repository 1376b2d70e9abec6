import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semigroup_lab import matrix_backend as mb
from semigroup_lab.bcalculus import FunctionFamily, b0_norm


def random_normal(n, seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    lam = -rng.uniform(0.2, 3, n) + 1j * rng.uniform(-4, 4, n)
    return Q @ np.diag(lam) @ Q.conj().T, lam, Q


def random_stable(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return M - (np.max(np.linalg.eigvals(M).real) + 0.5) * np.eye(n)


def test_dense_operator_validation():
    with pytest.raises(mb.MatrixError):
        mb.DenseOperator(np.zeros((2, 3)))
    with pytest.raises(mb.MatrixError):
        mb.DenseOperator.stable(np.eye(2))
    with pytest.raises(mb.MatrixError):
        mb.DenseOperator(np.eye(mb.MAX_DIM + 1))
    op = mb.DenseOperator.stable(np.diag([-1.0, -2.0]))
    assert op.invertible and op.is_normal and op.spectral_abscissa == -1


def test_json_roundtrip():
    A = np.array([[-1 + 1j, 0.5], [0, -2]])
    op = mb.DenseOperator.from_json(mb.DenseOperator(A).to_json())
    np.testing.assert_array_equal(op.entries, A)
    with pytest.raises(mb.MatrixError):
        mb.DenseOperator.from_json("[[1, 2]]")


def test_expm_diagonal():
    np.testing.assert_allclose(mb.expm(np.diag([-1.0, -2.0]), 0.5), np.diag([math.exp(-0.5), math.exp(-1)]), rtol=1e-15)


def test_expm_jordan():
    E = mb.expm(np.array([[-1.0, 1.0], [0.0, -1.0]]), 1.0)
    np.testing.assert_allclose(E, math.exp(-1) * np.array([[1, 1], [0, 1]]), rtol=1e-14)


def test_expm_normal_vs_eig():
    A, lam, Q = random_normal(8, 1)
    ref = Q @ np.diag(np.exp(lam * 1.7)) @ Q.conj().T
    assert np.linalg.norm(mb.expm(A, 1.7) - ref) / np.linalg.norm(ref) < 1e-10


def test_expm_overscaling():
    with pytest.raises(mb.OverscalingError):
        mb.expm(np.diag([-1.0]), 1e14)


@given(st.floats(0, 3), st.floats(0, 3), st.integers(0, 50))
def test_semigroup_law(s, t, seed):
    A = random_stable(5, seed)
    np.testing.assert_allclose(mb.expm(A, s) @ mb.expm(A, t), mb.expm(A, s + t), atol=1e-9 * max(1, np.abs(mb.expm(A, s + t)).max()))


def test_cayley_scalar_cases():
    assert abs(mb.cayley(np.array([[-1.0]]), 2.0)[0, 0]) < 1e-16
    assert mb.cayley(np.array([[-1 + 1j]]), 2.0)[0, 0] == pytest.approx((-1 + 2j) / 5, abs=1e-15)


def test_cayley_normal_singular_values():
    A, lam, _ = random_normal(8, 2)
    X = mb.cayley(A, 0.7)
    sv = np.sort(np.linalg.svd(X, compute_uv=False))
    ref = np.sort(np.abs((1 + 0.35 * lam) / (1 - 0.35 * lam)))
    np.testing.assert_allclose(sv, ref, rtol=1e-12)
    assert mb.cayley_residual(A, 0.7, X) < 1e-12


def test_cayley_eigen_consistency():
    A, lam, Q = random_normal(6, 3)
    X = mb.cayley(A, 1.3)
    a = (1 + 0.65 * lam) / (1 - 0.65 * lam)
    np.testing.assert_allclose(X @ Q, Q * a, atol=1e-12)


def test_cayley_singular():
    with pytest.raises(mb.MatrixError):
        mb.cayley(np.array([[1.0]]), 2.0)


def test_lyapunov_identity():
    np.testing.assert_allclose(mb.lyapunov_solve(-np.eye(2)), np.eye(2) / 2, atol=1e-15)


def test_lyapunov_diag():
    np.testing.assert_allclose(mb.lyapunov_solve(np.diag([-1.0, -2.0])), np.diag([0.5, 0.25]), atol=1e-15)


@pytest.mark.parametrize("xi", [0.0, 0.1])
def test_lyapunov_random_stable(xi):
    A = random_stable(8, 4)
    P = mb.lyapunov_solve(A, xi)
    assert mb.lyapunov_residual(A, xi, P) <= 1e-10
    assert np.allclose(P, P.conj().T)
    Pq = mb.lyapunov_quadrature(A, xi)
    assert np.linalg.norm(P - Pq) / np.linalg.norm(P) <= 1e-8


def test_lyapunov_quadrature_fallback_dimension():
    A, _, _ = random_normal(mb.KRON_MAX_DIM + 2, 5)
    P = mb.lyapunov_solve(A)
    assert mb.lyapunov_residual(A, 0.0, P) <= 1e-9


def test_lyapunov_unstable_shift():
    # the shifted generator A - xi I must stay stable
    with pytest.raises(mb.MatrixError):
        mb.lyapunov_solve(np.diag([-1.0, -2.0]), xi=-1.5)
    P = mb.lyapunov_solve(np.diag([-1.0, -2.0]), xi=1.5)
    np.testing.assert_allclose(np.diag(P).real, [1 / 5, 1 / 7], rtol=1e-14)


def test_frac_power_diag():
    np.testing.assert_allclose(mb.frac_power(np.diag([-1.0, -4.0]), 0.5), np.diag([1.0, 2.0]), atol=1e-15)


def test_frac_power_minus_one_is_inverse():
    A, _, _ = random_normal(6, 6)
    np.testing.assert_allclose(mb.frac_power(A, -1.0), np.linalg.inv(-A), atol=1e-12)


@given(st.floats(-2, 2), st.integers(0, 30))
def test_frac_power_inverse_pair(alpha, seed):
    A, _, _ = random_normal(5, seed)
    np.testing.assert_allclose(mb.frac_power(A, alpha) @ mb.frac_power(A, -alpha), np.eye(5), atol=1e-10)


def test_frac_power_rejects_defective():
    with pytest.raises(mb.MatrixError):
        mb.frac_power(np.array([[-1.0, 1.0], [0.0, -1.0]]), 0.5)


def test_semigroup_bound():
    assert mb.semigroup_bound(np.diag([0.0, 1.0])) == pytest.approx(1.0)
    with pytest.raises(mb.MatrixError):
        mb.semigroup_bound(np.array([[-1.0]]))


def test_bcalc_hshift_scalar():
    F = mb.bcalc_apply(FunctionFamily.hshift(1.0), np.zeros((1, 1)))
    assert abs(F[0, 0] - math.exp(-1)) <= 1e-8


def test_bcalc_hshift_diag():
    t = 2.0
    F = mb.bcalc_apply(FunctionFamily.hshift(t), np.diag([0.0, 1.0]))
    np.testing.assert_allclose(F, np.diag([math.exp(-t), math.exp(-t / 2)]), atol=1e-8)


def test_bcalc_fta_nonnormal_and_bound():
    N = np.array([[-0.5, 0.6, 0.0, 0.2], [0.0, -1.0, 0.6, 0.0], [0.0, 0.0, -1.5, 0.6], [0.0, 0.0, 0.0, -2.0]])
    A = -np.eye(4) + N
    assert not mb.DenseOperator(A).is_normal
    f = FunctionFamily.fta(1.0, 1.0)
    F = mb.bcalc_apply(f, -A - np.eye(4))
    ref = mb.expm(np.linalg.inv(A), 1.0) @ np.linalg.inv(-A)
    assert np.max(np.abs(F - ref)) <= 1e-6
    K = mb.semigroup_bound(-A - np.eye(4))
    assert np.linalg.norm(F, 2) <= abs(f.at_infinity) + 2 * K * K * b0_norm(f).b0 + 1e-6


def test_bcalc_rescaled_identity():
    # spectral bound -2: rescale A -> A/2 so that ||e^{(A/2) t}|| <= e^{-t}; B then has eigenvalue 0
    A = np.diag([-2.0, -3.0]) + np.array([[0, 0.5], [0, 0]])
    As = A / 2
    F = mb.bcalc_apply(FunctionFamily.fta(2.0, 1.0), -As - np.eye(2))
    ref = mb.expm(np.linalg.inv(As), 2.0) @ np.linalg.inv(-As)
    assert np.max(np.abs(F - ref)) <= 1e-6
