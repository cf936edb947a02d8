import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from phaseforge import matnum
from phaseforge.errors import (
    DimensionMismatch,
    NoConvergence,
    NonFinite,
    NotNonnegative,
    SingularMatrix,
    UsageError,
)

bounded = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False, allow_subnormal=False)


def test_solve_linear_small_system():
    x = matnum.solve_linear([[4.0, 1.0], [2.0, 3.0]], [1.0, 2.0])
    assert np.allclose(x, [0.1, 0.6])


def test_solve_linear_needs_pivoting():
    x = matnum.solve_linear([[0.0, 1.0], [1.0, 0.0]], [2.0, 3.0])
    assert np.allclose(x, [3.0, 2.0])


def test_solve_linear_singular():
    with pytest.raises(SingularMatrix):
        matnum.solve_linear([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])
    with pytest.raises(SingularMatrix):
        matnum.solve_linear([[0.0, 0.0], [0.0, 0.0]], [1.0, 1.0])


def test_solve_linear_shape_and_finiteness():
    with pytest.raises(DimensionMismatch):
        matnum.solve_linear([[1.0, 0.0], [0.0, 1.0]], [1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatch):
        matnum.solve_linear([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], [1.0, 2.0])
    with pytest.raises(NonFinite):
        matnum.solve_linear([[np.nan, 0.0], [0.0, 1.0]], [1.0, 2.0])


def test_results_are_read_only():
    x = matnum.solve_linear(np.eye(2), [1.0, 2.0])
    with pytest.raises(ValueError):
        x[0] = 5.0


@given(st.integers(min_value=1, max_value=50), st.integers(min_value=0, max_value=2**32 - 1))
def test_solve_linear_residual(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.uniform(-3.0, 3.0, (n, n)) + (3.0 * n + 1.0) * np.eye(n)  # strictly diagonally dominant
    b = rng.uniform(-3.0, 3.0, n)
    x = matnum.solve_linear(A, b)
    assert np.max(np.abs(A @ x - b)) <= 1e-10 * (1.0 + np.max(np.abs(b)))


def test_mat_exp_zero_and_diagonal():
    assert np.array_equal(matnum.mat_exp(np.zeros((3, 3))), np.eye(3))
    E = matnum.mat_exp(np.diag([-1.0, 0.5]))
    assert np.allclose(E, np.diag([np.exp(-1.0), np.exp(0.5)]), rtol=1e-13)


def test_mat_exp_nilpotent():
    E = matnum.mat_exp([[0.0, 1.0], [0.0, 0.0]])
    assert np.allclose(E, [[1.0, 1.0], [0.0, 1.0]], atol=1e-14)


def test_mat_exp_large_norm_is_scaled():
    A = np.array([[-40.0, 30.0], [10.0, -25.0]])
    ref = scipy.linalg.expm(A)
    assert np.linalg.norm(matnum.mat_exp(A) - ref) <= 1e-10 * np.linalg.norm(ref)


@given(arrays(np.float64, (5, 5), elements=bounded))
def test_mat_exp_agrees_with_scipy(A):
    ref = scipy.linalg.expm(A)
    assert np.linalg.norm(matnum.mat_exp(A) - ref) <= 1e-9 * np.linalg.norm(ref)


@given(arrays(np.float64, (4,), elements=st.floats(-100.0, 100.0, allow_nan=False, allow_subnormal=False)))
def test_mat_exp_diagonal_to_full_precision(d):
    E = matnum.mat_exp(np.diag(d))
    np.testing.assert_allclose(np.diag(E), np.exp(d), rtol=1e-12, atol=0.0)
    assert np.all(E[~np.eye(4, dtype=bool)] == 0.0)


@given(st.floats(-25.0, 25.0), st.floats(-25.0, 25.0))
def test_mat_exp_jordan_block_to_full_precision(a, b):
    expected = np.exp(a) * np.array([[1.0, b], [0.0, 1.0]])
    E = matnum.mat_exp([[a, b], [0.0, a]])
    assert np.max(np.abs(E - expected)) <= 1e-12 * np.max(np.abs(expected))


def test_mat_pow():
    A = np.array([[0.5, 0.5], [0.0, 1.0]])
    assert np.array_equal(matnum.mat_pow(A, 0), np.eye(2))
    assert np.allclose(matnum.mat_pow(A, 3), A @ A @ A)
    with pytest.raises(UsageError):
        matnum.mat_pow(A, -1)


def test_dominant_eigenpair_of_positive_matrix():
    lam, v = matnum.dominant_eigenpair([[2.0, 1.0], [1.0, 2.0]])
    assert lam == pytest.approx(3.0, abs=1e-10)
    assert np.allclose(v, [1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-10)
    assert np.linalg.norm(v) == pytest.approx(1.0)


def test_dominant_eigenpair_rejects_negative_entries():
    with pytest.raises(NotNonnegative):
        matnum.dominant_eigenpair([[1.0, -0.5], [0.0, 1.0]])


def test_dominant_eigenpair_budget():
    # eigenvalues +-sqrt(2) tie in modulus
    with pytest.raises(NoConvergence):
        matnum.dominant_eigenpair([[0.0, 1.0], [2.0, 0.0]], max_iter=50)


def test_perron_bounds_bracket_the_root():
    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    lo, hi = matnum.perron_bounds(A, threshold=3.5)
    assert lo <= 3.0 <= hi < 3.5
    lo, hi = matnum.perron_bounds(A, threshold=2.5)
    assert lo >= 2.5


def test_perron_bounds_on_jordan_block():
    # defective eigenvalue 2: the bracket still clears a nearby threshold
    A = np.array([[2.0, 1.0], [0.0, 2.0]])
    _, hi = matnum.perron_bounds(A, threshold=2.0 + 1e-3, max_iter=100_000)
    assert hi < 2.0 + 1e-3


def test_perron_bounds_needs_positive_diagonal():
    with pytest.raises(UsageError):
        matnum.perron_bounds([[0.0, 1.0], [1.0, 1.0]], threshold=1.0)


def test_solve_linear_transform_systems():
    student = np.array([[0.2, 0.0, 0.0], [0.85, 0.15, 0.0], [0.0, 0.92, 0.08]])
    assert np.allclose(matnum.solve_linear(np.eye(3) - student, [1.0, 0.0, 0.0]), [1.25, 1.25, 1.25])
    supply = [[0.75, 0.0, 0.0], [-0.6, 0.88, -0.05], [0.0, -0.8, 0.85]]
    assert np.allclose(matnum.solve_linear(supply, [1.0, 0.0, 0.0]), [1.333333, 0.960452, 0.903955], atol=1e-6)


def test_mat_exp_of_generator_is_stochastic():
    generator = np.array([
        [-2.0, 4.0 / 3.0, 0.0, 2.0 / 3.0],
        [0.0, -1.0, 0.5, 0.5],
        [0.0, 0.0, -1.0, 1.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    assert np.allclose(matnum.mat_exp(generator).sum(axis=1), 1.0, atol=1e-10)


def test_mat_exp_of_commuting_sum():
    A, B = np.diag([0.3, -1.2, 2.0]), np.diag([-0.7, 0.4, 1.1])
    assert np.allclose(matnum.mat_exp(A + B), matnum.mat_exp(A) @ matnum.mat_exp(B), rtol=1e-10)


@given(st.integers(0, 16), st.integers(0, 16))
def test_mat_pow_adds_exponents(j, k):
    A = np.array([[0.2, 0.0, 0.0], [0.85, 0.15, 0.0], [0.0, 0.92, 0.08]])
    assert np.allclose(matnum.mat_pow(A, j + k), matnum.mat_pow(A, j) @ matnum.mat_pow(A, k), atol=1e-12)


def test_dominant_eigenpair_of_shifted_augmented_matrix():
    delta = np.array([
        [-2.0, 1.0, 0.0, 1.0],
        [0.0, -1.0, 1.0, 1.0],
        [0.0, 0.0, -1.0, 1.0],
        [0.0, 0.0, 0.0, 0.0],
    ])
    lam, v = matnum.dominant_eigenpair(delta + 2.0 * np.eye(4))
    assert lam == pytest.approx(2.0, abs=1e-10)
    assert np.allclose(v, [0.5222330, 0.6963106, 0.3481553, 0.3481553], atol=1e-7)


def test_dominant_eigenpair_scales_with_matrix():
    A = np.array([[2.0, 1.0, 0.5], [0.3, 1.0, 0.2], [0.1, 0.4, 3.0]])
    lam, v = matnum.dominant_eigenpair(A)
    scaled_lam, scaled_v = matnum.dominant_eigenpair(7.0 * A)
    assert scaled_lam == pytest.approx(7.0 * lam, rel=1e-10)
    assert np.allclose(v, scaled_v, atol=1e-9)
