import numpy as np
import pytest

from amg.errors import GridSizeError
from amg.problems import expected_nnz, generate_poisson
from amg.sparse import transpose
from models.problem import ProblemKind, ProblemSpec


def laplacian_by_hand(nx: int, ny: int, wx: float, wy: float) -> np.ndarray:
    n = nx * ny
    A = np.zeros((n, n))
    for j in range(ny):
        for i in range(nx):
            row = j * nx + i
            A[row, row] = 2 * (wx + wy)
            if i > 0:
                A[row, row - 1] = -wx
            if i < nx - 1:
                A[row, row + 1] = -wx
            if j > 0:
                A[row, row - nx] = -wy
            if j < ny - 1:
                A[row, row + nx] = -wy
    return A


def test_isotropic_3x3_matches_hand_assembly():
    A, b = generate_poisson(ProblemSpec(ProblemKind.POISSON2D, 3, 3, epsilon=1.0))
    np.testing.assert_array_equal(A.to_dense(), laplacian_by_hand(3, 3, 1.0, 1.0))
    np.testing.assert_array_equal(b, np.ones(9))


def test_anisotropic_weak_axis_defaults_to_y():
    A, _ = generate_poisson(ProblemSpec(ProblemKind.POISSON2D, 4, 3, epsilon=0.01))
    np.testing.assert_array_equal(A.to_dense(), laplacian_by_hand(4, 3, 1.0, 0.01))


def test_orientation_moves_the_weak_axis():
    A, _ = generate_poisson(ProblemSpec(ProblemKind.POISSON2D, 4, 3, epsilon=0.01, orientation="x"))
    np.testing.assert_array_equal(A.to_dense(), laplacian_by_hand(4, 3, 0.01, 1.0))


def test_single_point_grid():
    A, b = generate_poisson(ProblemSpec(ProblemKind.POISSON2D, 1, 1, epsilon=0.01))
    assert A.shape == (1, 1)
    assert A.values[0] == 2 * (1 + 0.01)
    np.testing.assert_array_equal(b, [1.0])


@pytest.mark.parametrize("nx,ny", [(1, 1), (1, 5), (5, 1), (2, 2), (7, 3), (16, 16)])
def test_2d_nnz_formula(nx, ny):
    spec = ProblemSpec(ProblemKind.POISSON2D, nx, ny)
    A, _ = generate_poisson(spec)
    assert A.nnz == 5 * nx * ny - 2 * nx - 2 * ny == expected_nnz(spec)


@pytest.mark.parametrize("dims", [(1, 1, 1), (2, 3, 4), (5, 5, 5)])
def test_3d_nnz_formula_and_interior_row(dims):
    nx, ny, nz = dims
    spec = ProblemSpec(ProblemKind.POISSON3D, nx, ny, nz, epsilon=0.1)
    A, _ = generate_poisson(spec)
    assert A.nnz == expected_nnz(spec)
    np.testing.assert_allclose(A.diagonal(), 2 * (1 + 1 + 0.1))


def test_3d_weak_axis_is_z_by_default():
    spec = ProblemSpec(ProblemKind.POISSON3D, 3, 3, 3, epsilon=0.1)
    A, _ = generate_poisson(spec)
    dense = A.to_dense()
    center = 1 + 3 * 1 + 9 * 1
    assert dense[center, center + 1] == -1.0
    assert dense[center, center + 3] == -1.0
    assert dense[center, center + 9] == -0.1


def test_generated_matrices_are_symmetric_and_diagonally_dominant():
    A, _ = generate_poisson(ProblemSpec(ProblemKind.POISSON2D, 9, 6, epsilon=0.3))
    T = transpose(A)
    np.testing.assert_array_equal(T.row_offsets, A.row_offsets)
    np.testing.assert_array_equal(T.col_indices, A.col_indices)
    np.testing.assert_array_equal(T.values, A.values)
    dense = A.to_dense()
    off = np.abs(dense).sum(axis=1) - np.abs(np.diag(dense))
    assert (np.diag(dense) >= off).all()


def test_random_rhs_is_seeded():
    spec = ProblemSpec(ProblemKind.POISSON2D, 5, 5)
    _, b1 = generate_poisson(spec, random_rhs=True, seed=7)
    _, b2 = generate_poisson(spec, random_rhs=True, seed=7)
    _, b3 = generate_poisson(spec, random_rhs=True, seed=8)
    np.testing.assert_array_equal(b1, b2)
    assert not np.array_equal(b1, b3)


def test_index_overflow_is_rejected():
    spec = ProblemSpec(ProblemKind.POISSON3D, 2 ** 21, 2 ** 21, 2 ** 21)
    with pytest.raises(GridSizeError):
        generate_poisson(spec)


@pytest.mark.parametrize("kwargs", [
    dict(kind="poisson2d", nx=0),
    dict(kind="poisson2d", nx=3, epsilon=0.0),
    dict(kind="poisson2d", nx=3, orientation="z"),
    dict(kind="poisson2d", nx=3, nz=2),
    dict(kind="poisson4d", nx=3),
])
def test_invalid_problem_specs(kwargs):
    with pytest.raises(ValueError):
        ProblemSpec(**kwargs)
