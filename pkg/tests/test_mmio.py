import numpy as np
import pytest

from amg.errors import EmptyVectorError, MatrixMarketError
from amg.mmio import read_matrix_market, read_vector, write_matrix_market, write_vector
from amg.sparse import SparseMatrix, TripletList, triplets_to_csr
from oracles import random_sparse


def write_text(path, text: str):
    path.write_text(text)
    return path


def test_read_identity(tmp_path):
    path = write_text(tmp_path / "eye.mtx", "%%MatrixMarket matrix coordinate real general\n"
                                            "2 2 2\n1 1 1.0\n2 2 1.0\n")
    A = read_matrix_market(path)
    np.testing.assert_array_equal(A.to_dense(), np.eye(2))


def test_read_expands_symmetric_storage(tmp_path):
    path = write_text(tmp_path / "tridiag.mtx", "%%MatrixMarket matrix coordinate real symmetric\n"
                                                "3 3 5\n1 1 2\n2 1 -1\n2 2 2\n3 2 -1\n3 3 2\n")
    A = read_matrix_market(path)
    A.check_canonical()
    expected = 2 * np.eye(3) - np.eye(3, k=1) - np.eye(3, k=-1)
    np.testing.assert_array_equal(A.to_dense(), expected)
    assert A.nnz == 7


def test_read_sums_duplicates(tmp_path):
    path = write_text(tmp_path / "dup.mtx", "%%MatrixMarket matrix coordinate real general\n"
                                            "2 2 3\n1 1 1.5\n1 1 2.5\n2 1 -1\n")
    A = read_matrix_market(path)
    assert A.nnz == 2
    assert A.to_dense()[0, 0] == 4.0


def test_read_array_format(tmp_path):
    path = write_text(tmp_path / "dense.mtx", "%%MatrixMarket matrix array real general\n"
                                              "2 2\n1\n3\n2\n4\n")
    A = read_matrix_market(path)
    np.testing.assert_array_equal(A.to_dense(), [[1.0, 2.0], [3.0, 4.0]])


def test_pattern_needs_explicit_flag(tmp_path):
    path = write_text(tmp_path / "pattern.mtx", "%%MatrixMarket matrix coordinate pattern general\n"
                                                "2 2 2\n1 2\n2 1\n")
    with pytest.raises(MatrixMarketError, match="pattern"):
        read_matrix_market(path)
    A = read_matrix_market(path, pattern_as_ones=True)
    np.testing.assert_array_equal(A.to_dense(), [[0.0, 1.0], [1.0, 0.0]])


def test_complex_is_rejected(tmp_path):
    path = write_text(tmp_path / "complex.mtx", "%%MatrixMarket matrix coordinate complex general\n"
                                                "1 1 1\n1 1 1.0 2.0\n")
    with pytest.raises(MatrixMarketError, match="complex"):
        read_matrix_market(path)


def test_parse_error_names_the_line(tmp_path):
    path = write_text(tmp_path / "bad.mtx", "%%MatrixMarket matrix coordinate real general\n"
                                            "2 2 2\n1 1 abc\n2 2 1.0\n")
    with pytest.raises(MatrixMarketError) as err:
        read_matrix_market(path)
    assert err.value.line == 3
    assert f"{path}:3" in str(err.value)


@pytest.mark.parametrize("body, line, message", [
    ("2 2 3\n1 1 1.0\n2 2 1.0\n", 5, "ends after 2 of 3"),
    ("2 2 2\n1 1 1.0\n3 1 1.0\n", 4, "outside the 2x2"),
    ("2 2 2\n1 1\n2 2 1.0\n", 3, "expected 3 fields"),
    ("2 2 2\n1 1 1.0 5.0\n2 2 1.0\n", 3, "trailing field"),
    ("2 2 1\n1 1 1.0\n2 2 1.0\n", 4, "more than the 1"),
])
def test_malformed_coordinate_entries_name_the_line(tmp_path, body, line, message):
    path = write_text(tmp_path / "bad.mtx", "%%MatrixMarket matrix coordinate real general\n" + body)
    with pytest.raises(MatrixMarketError, match=message) as err:
        read_matrix_market(path)
    assert err.value.line == line


def test_truncated_vector_names_the_line(tmp_path):
    path = write_text(tmp_path / "short.mtx", "%%MatrixMarket matrix array real general\n"
                                              "% rhs\n3 1\n1.0\n2.0\n")
    with pytest.raises(MatrixMarketError, match="ends after 2 of 3") as err:
        read_vector(path)
    assert err.value.line == 6


def test_missing_file_carries_path(tmp_path):
    path = tmp_path / "missing.mtx"
    with pytest.raises(OSError, match="missing.mtx"):
        read_matrix_market(path)


def test_matrix_round_trip_is_bit_exact(tmp_path, rng):
    A = random_sparse(rng, 15, 11, 0.3)
    A = A.with_values(rng.standard_normal(A.nnz) * 10.0 ** rng.integers(-8, 8, A.nnz))
    write_matrix_market(A, tmp_path / "a.mtx", comment="random")
    B = read_matrix_market(tmp_path / "a.mtx")
    assert B.shape == A.shape
    np.testing.assert_array_equal(B.row_offsets, A.row_offsets)
    np.testing.assert_array_equal(B.col_indices, A.col_indices)
    np.testing.assert_array_equal(B.values, A.values)


def test_identity_round_trip(tmp_path):
    write_matrix_market(SparseMatrix.identity(3), tmp_path / "eye.mtx")
    np.testing.assert_array_equal(read_matrix_market(tmp_path / "eye.mtx").to_dense(), np.eye(3))


def test_write_keeps_explicit_zeros(tmp_path):
    A = triplets_to_csr(TripletList.from_entries([(0, 0, 1.0), (0, 1, 0.0), (1, 1, 2.0)], (2, 2)))
    write_matrix_market(A, tmp_path / "z.mtx")
    assert read_matrix_market(tmp_path / "z.mtx").nnz == 3


def test_vector_round_trip_is_bit_exact(tmp_path, rng):
    values = rng.standard_normal(1000)
    write_vector(tmp_path / "v.mtx", values)
    np.testing.assert_array_equal(read_vector(tmp_path / "v.mtx"), values)


def test_empty_vector_is_an_error(tmp_path):
    with pytest.raises(EmptyVectorError, match="empty vector"):
        write_vector(tmp_path / "empty.mtx", [])


def test_vector_must_be_a_single_column(tmp_path):
    write_matrix_market(SparseMatrix.identity(2), tmp_path / "eye.mtx")
    with pytest.raises(MatrixMarketError, match="single column"):
        read_vector(tmp_path / "eye.mtx")


def test_write_to_missing_directory_carries_path(tmp_path):
    target = tmp_path / "nope" / "a.mtx"
    with pytest.raises(OSError, match="nope"):
        write_matrix_market(SparseMatrix.identity(2), target)
