import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from amg.errors import ZeroDiagonalError
from amg.smoothers import arnoldi_spectral_radius, inverse_diagonal, setup_smoother, smooth, smooth_times
from amg.sparse import SparseMatrix
from models.config import SmootherKind
from oracles import poisson2d

KINDS = [SmootherKind.JACOBI, SmootherKind.DAMPED_JACOBI, SmootherKind.SGS]


def laplacian_1d(n: int) -> SparseMatrix:
    return SparseMatrix.from_scipy(sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1]))


def random_spd(rng, n: int) -> SparseMatrix:
    M = rng.standard_normal((n, n))
    return SparseMatrix.from_dense(M @ M.T / n + np.eye(n))


def test_diagonal_matrix_gives_exact_damping():
    A = SparseMatrix.diag([2.0, 5.0, 0.5, 7.0])
    state = setup_smoother(A, SmootherKind.DAMPED_JACOBI)
    assert state.rho_est == 1.0
    assert state.omega == 4.0 / 3.0


def test_1d_laplacian_damping_is_close_to_two_thirds():
    state = setup_smoother(laplacian_1d(100), SmootherKind.DAMPED_JACOBI, arnoldi_m=5, seed=0)
    assert state.omega == pytest.approx(2.0 / 3.0, rel=0.05)
    assert state.omega == pytest.approx(4.0 / 3.0 / state.rho_est, rel=1e-15)


def test_2d_poisson_spectral_radius_estimate(poisson_32):
    A, _ = poisson_32
    inv_diag = inverse_diagonal(A)
    scale = sp.diags(np.sqrt(inv_diag))
    exact = eigsh(scale @ A.to_scipy() @ scale, k=1, which="LA", return_eigenvectors=False)[0]
    estimate = arnoldi_spectral_radius(A, inv_diag, m=5, seed=0)
    assert estimate == pytest.approx(exact, rel=0.1)


def test_arnoldi_breakdown_uses_the_partial_hessenberg():
    # two distinct eigenvalues of D^-1 A: the Krylov space is exhausted after two steps
    A = SparseMatrix.from_dense([[2.0, 1.0, 0.0, 0.0], [1.0, 2.0, 0.0, 0.0],
                                 [0.0, 0.0, 2.0, 1.0], [0.0, 0.0, 1.0, 2.0]])
    rho = arnoldi_spectral_radius(A, inverse_diagonal(A), m=5, seed=3)
    assert rho == pytest.approx(1.5, rel=1e-10)


def test_arnoldi_is_seeded():
    A = laplacian_1d(60)
    inv_diag = inverse_diagonal(A)
    assert arnoldi_spectral_radius(A, inv_diag, seed=4) == arnoldi_spectral_radius(A, inv_diag, seed=4)


def test_jacobi_uses_unit_damping():
    state = setup_smoother(laplacian_1d(10), SmootherKind.JACOBI)
    assert state.omega == 1.0
    assert state.rho_est is None


def test_zero_diagonal_names_the_row():
    A = SparseMatrix.from_dense([[1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 0.0]])
    with pytest.raises(ZeroDiagonalError) as err:
        setup_smoother(A, SmootherKind.JACOBI)
    assert err.value.row == 2


def test_damped_jacobi_by_hand():
    A = SparseMatrix.diag([2.0, 2.0])
    state = setup_smoother(A, SmootherKind.DAMPED_JACOBI)
    np.testing.assert_allclose(smooth(state, A, [2.0, 2.0], np.zeros(2)), [4.0 / 3.0, 4.0 / 3.0], rtol=1e-15)


@pytest.mark.parametrize("kind", KINDS)
def test_exact_solution_is_a_fixed_point(kind, rng):
    A = random_spd(rng, 20)
    x = rng.standard_normal(20)
    b = A.to_dense() @ x
    x_star = np.linalg.solve(A.to_dense(), b)
    state = setup_smoother(A, kind)
    np.testing.assert_allclose(smooth(state, A, b, x_star), x_star, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_sweep_is_linear_in_rhs_and_iterate(kind, rng):
    A = random_spd(rng, 15)
    state = setup_smoother(A, kind)
    b1, b2, x1, x2 = (rng.standard_normal(15) for _ in range(4))
    combined = smooth(state, A, b1 + 3 * b2, x1 + 3 * x2)
    separate = smooth(state, A, b1, x1) + 3 * smooth(state, A, b2, x2)
    np.testing.assert_allclose(combined, separate, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("kind", [SmootherKind.DAMPED_JACOBI, SmootherKind.SGS])
def test_error_energy_never_grows(kind, rng):
    A = random_spd(rng, 30)
    dense = A.to_dense()
    x_star = rng.standard_normal(30)
    b = dense @ x_star
    state = setup_smoother(A, kind)
    x = np.zeros(30)
    energy = []
    for _ in range(50):
        e = x - x_star
        energy.append(np.sqrt(e @ dense @ e))
        x = smooth(state, A, b, x)
    floor = 1e-12 * energy[0]
    assert all(later <= earlier * (1 + 1e-12) + floor for earlier, later in zip(energy, energy[1:]))
    assert energy[-1] < energy[0]


def test_damped_jacobi_iteration_matrix_is_contractive():
    A = laplacian_1d(20)
    state = setup_smoother(A, SmootherKind.DAMPED_JACOBI)
    E = np.eye(20) - state.omega * np.diag(state.inv_diag) @ A.to_dense()
    assert np.max(np.abs(np.linalg.eigvals(E))) < 1.0


def test_sgs_is_one_forward_and_one_backward_sweep():
    A = laplacian_1d(6)
    dense = A.to_dense()
    b = np.arange(1.0, 7.0)
    x = np.zeros(6)
    L, U = np.tril(dense), np.triu(dense)
    x = x + np.linalg.solve(L, b - dense @ x)
    x = x + np.linalg.solve(U, b - dense @ x)
    state = setup_smoother(A, SmootherKind.SGS)
    np.testing.assert_allclose(smooth(state, A, b, np.zeros(6)), x, rtol=1e-13)


def test_smooth_times_repeats_sweeps():
    A = laplacian_1d(8)
    state = setup_smoother(A, SmootherKind.JACOBI)
    b = np.ones(8)
    once = smooth(state, A, b, smooth(state, A, b, np.zeros(8)))
    np.testing.assert_array_equal(smooth_times(state, A, b, np.zeros(8), 2), once)
    np.testing.assert_array_equal(smooth_times(state, A, b, np.ones(8), 0), np.ones(8))


def test_jacobi_sweeps_do_not_depend_on_thread_count(threads):
    A, b = poisson2d(100)
    state = setup_smoother(A, SmootherKind.DAMPED_JACOBI)
    threads(1)
    x1 = smooth(state, A, b, np.zeros(A.n_rows))
    threads(4)
    x4 = smooth(state, A, b, np.zeros(A.n_rows))
    np.testing.assert_array_equal(x1, x4)
