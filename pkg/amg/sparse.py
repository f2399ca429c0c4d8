"""
Compressed-row sparse matrices and the kernels built on them.

Every matrix produced here is canonical: column indices strictly increase
within a row and no (row, col) pair is stored twice. Explicitly stored zeros
are structural and are never dropped, so patterns stay stable when values
change. Products are assembled from expanded (row, col, value) triplets that
are stably sorted by (row, col); duplicates are folded in that order, which
makes every kernel reproducible run to run and independent of the thread cap.
"""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from amg.errors import DimensionMismatchError, IndexOutOfShapeError
from core.pool import map_row_blocks

INDEX_DTYPE = np.int64
VALUE_DTYPE = np.float64


def as_vector(x, n: Optional[int] = None, what: str = "vector") -> np.ndarray:
    """Return ``x`` as a 1-D float64 array, checking its length against ``n``."""
    x = np.asarray(x, dtype=VALUE_DTYPE)
    if x.ndim != 1:
        x = x.reshape(-1)
    if n is not None and x.shape[0] != n:
        raise DimensionMismatchError(what, n, x.shape[0])
    return x


@dataclass(eq=False)
class SparseMatrix:
    """
    Canonical compressed sparse row matrix. Treated as immutable once built.
    """
    n_rows: int
    n_cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray
    _scipy: Optional[sp.csr_matrix] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.n_rows = int(self.n_rows)
        self.n_cols = int(self.n_cols)
        self.row_offsets = np.ascontiguousarray(self.row_offsets, dtype=INDEX_DTYPE)
        self.col_indices = np.ascontiguousarray(self.col_indices, dtype=INDEX_DTYPE)
        self.values = np.ascontiguousarray(self.values, dtype=VALUE_DTYPE)
        if self.row_offsets.shape != (self.n_rows + 1,):
            raise ValueError(f"row_offsets must have length {self.n_rows + 1}, "
                             f"got {self.row_offsets.shape[0]}")
        nnz = int(self.row_offsets[-1])
        if self.col_indices.shape[0] != nnz or self.values.shape[0] != nnz:
            raise ValueError(f"row_offsets declare {nnz} entries but col_indices has "
                             f"{self.col_indices.shape[0]} and values {self.values.shape[0]}")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def nnz(self) -> int:
        return int(self.row_offsets[-1])

    @property
    def nnz_per_row(self) -> float:
        return self.nnz / self.n_rows if self.n_rows else 0.0

    @property
    def T(self) -> "SparseMatrix":
        return transpose(self)

    def row_lengths(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def row_ids(self) -> np.ndarray:
        """Row index of every stored entry, in storage order."""
        return np.repeat(np.arange(self.n_rows, dtype=INDEX_DTYPE), self.row_lengths())

    def diagonal(self) -> np.ndarray:
        """Main diagonal; structurally missing entries read as zero."""
        diag = np.zeros(min(self.n_rows, self.n_cols), dtype=VALUE_DTYPE)
        rows = self.row_ids()
        on_diag = rows == self.col_indices
        diag[rows[on_diag]] = self.values[on_diag]
        return diag

    def with_values(self, values) -> "SparseMatrix":
        """Same pattern, new value array."""
        values = np.asarray(values, dtype=VALUE_DTYPE)
        if values.shape != (self.nnz,):
            raise DimensionMismatchError("value array", self.nnz, values.shape[0] if values.ndim else 0)
        return SparseMatrix(self.n_rows, self.n_cols, self.row_offsets, self.col_indices, values)

    def scaled(self, factor: float) -> "SparseMatrix":
        return self.with_values(self.values * factor)

    def to_scipy(self) -> sp.csr_matrix:
        """View as a ``scipy.sparse.csr_matrix`` (cached, shares the arrays)."""
        if self._scipy is None:
            self._scipy = sp.csr_matrix((self.values, self.col_indices, self.row_offsets),
                                        shape=self.shape)
            self._scipy.has_sorted_indices = True
        return self._scipy

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def row_block(self, start: int, stop: int) -> sp.csr_matrix:
        """Rows ``start:stop`` as a scipy matrix built on views of the storage."""
        lo, hi = self.row_offsets[start], self.row_offsets[stop]
        block = sp.csr_matrix((self.values[lo:hi], self.col_indices[lo:hi],
                               self.row_offsets[start:stop + 1] - lo),
                              shape=(stop - start, self.n_cols))
        block.has_sorted_indices = True
        return block

    def check_canonical(self) -> None:
        """Raise ``ValueError`` unless every CSR invariant holds."""
        lengths = self.row_lengths()
        if self.row_offsets[0] != 0 or (lengths < 0).any():
            raise ValueError("row_offsets must start at 0 and be non-decreasing")
        if self.nnz and (self.col_indices.min() < 0 or self.col_indices.max() >= self.n_cols):
            raise ValueError("column index out of range")
        steps = np.diff(self.col_indices)
        row_starts = self.row_offsets[1:-1]
        inside_row = np.ones(steps.shape[0], dtype=bool)
        inside_row[row_starts[(row_starts > 0) & (row_starts < self.nnz)] - 1] = False
        if (steps[inside_row] <= 0).any():
            raise ValueError("column indices must strictly increase within each row")

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            return spmm(self, other)
        return spmv(self, other)

    @classmethod
    def from_scipy(cls, matrix) -> "SparseMatrix":
        """Canonical copy of any scipy sparse matrix or dense array; duplicates are summed."""
        csr = sp.csr_matrix(matrix, dtype=VALUE_DTYPE, copy=True)
        csr.sum_duplicates()
        return cls(csr.shape[0], csr.shape[1], csr.indptr, csr.indices, csr.data)

    @classmethod
    def from_dense(cls, dense) -> "SparseMatrix":
        """Canonical matrix holding the nonzeros of a dense array."""
        dense = np.atleast_2d(np.asarray(dense, dtype=VALUE_DTYPE))
        rows, cols = np.nonzero(dense)
        return _compress(rows, cols, dense[rows, cols], dense.shape[0], dense.shape[1])

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls.diag(np.ones(n))

    @classmethod
    def diag(cls, values) -> "SparseMatrix":
        values = as_vector(values)
        n = values.shape[0]
        return cls(n, n, np.arange(n + 1), np.arange(n), values)

    @classmethod
    def empty(cls, n_rows: int, n_cols: int) -> "SparseMatrix":
        return cls(n_rows, n_cols, np.zeros(n_rows + 1), np.zeros(0), np.zeros(0))


@dataclass
class TripletList:
    """
    Unsorted (row, col, value) staging list; duplicates are allowed.
    """
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    shape: Tuple[int, int]

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=INDEX_DTYPE).reshape(-1)
        self.cols = np.asarray(self.cols, dtype=INDEX_DTYPE).reshape(-1)
        self.values = np.asarray(self.values, dtype=VALUE_DTYPE).reshape(-1)
        if not (self.rows.shape == self.cols.shape == self.values.shape):
            raise ValueError("triplet arrays must have equal lengths")

    @classmethod
    def from_entries(cls, entries: Sequence[Tuple[int, int, float]], shape) -> "TripletList":
        if len(entries) == 0:
            return cls(np.zeros(0), np.zeros(0), np.zeros(0), shape)
        rows, cols, values = zip(*entries)
        return cls(np.array(rows), np.array(cols), np.array(values), shape)


def _compress(rows: np.ndarray, cols: np.ndarray, values: np.ndarray,
              n_rows: int, n_cols: int, fold: np.ufunc = np.add) -> SparseMatrix:
    """
    Sort triplets by (row, col, original position) and fold duplicates with ``fold``.
    """
    rows = np.asarray(rows, dtype=INDEX_DTYPE)
    cols = np.asarray(cols, dtype=INDEX_DTYPE)
    values = np.asarray(values, dtype=VALUE_DTYPE)
    if n_cols and n_rows < np.iinfo(INDEX_DTYPE).max // max(n_cols, 1):
        order = np.argsort(rows * n_cols + cols, kind="stable")
    else:
        order = np.lexsort((cols, rows))
    rows, cols, values = rows[order], cols[order], values[order]
    if rows.shape[0]:
        first = np.empty(rows.shape[0], dtype=bool)
        first[0] = True
        np.not_equal(rows[1:], rows[:-1], out=first[1:])
        first[1:] |= cols[1:] != cols[:-1]
        starts = np.flatnonzero(first)
        if starts.shape[0] != rows.shape[0]:
            values = fold.reduceat(values, starts)
            rows, cols = rows[starts], cols[starts]
    offsets = np.zeros(n_rows + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(rows, minlength=n_rows), out=offsets[1:])
    return SparseMatrix(n_rows, n_cols, offsets, cols, values)


def _stack_rows(blocks: List[SparseMatrix], n_cols: int) -> SparseMatrix:
    if len(blocks) == 1:
        return blocks[0]
    offsets = [np.zeros(1, dtype=INDEX_DTYPE)]
    base = 0
    for block in blocks:
        offsets.append(block.row_offsets[1:] + base)
        base += block.nnz
    return SparseMatrix(sum(b.n_rows for b in blocks), n_cols, np.concatenate(offsets),
                        np.concatenate([b.col_indices for b in blocks]),
                        np.concatenate([b.values for b in blocks]))


def triplets_to_csr(triplets: TripletList, combine: str = "sum") -> SparseMatrix:
    """
    Build a canonical matrix from triplets, summing duplicates.

    Duplicates are summed in (row, col, original position) order, so the
    result is reproducible run to run.

    Raises:
        IndexOutOfShapeError: a row or column index lies outside ``triplets.shape``
    """
    if combine != "sum":
        raise ValueError(f"unsupported combine mode {combine!r}")
    n_rows, n_cols = triplets.shape
    for name, index, bound in (("row", triplets.rows, n_rows), ("column", triplets.cols, n_cols)):
        bad = np.flatnonzero((index < 0) | (index >= bound))
        if bad.shape[0]:
            raise IndexOutOfShapeError(
                f"triplet {bad[0]}: {name} index {index[bad[0]]} outside shape {triplets.shape}")
    return _compress(triplets.rows, triplets.cols, triplets.values, n_rows, n_cols)


def spmv(A: SparseMatrix, x) -> np.ndarray:
    """
    y = A x, computed over row blocks in parallel.

    Each row sums its entries in storage order, so the result does not depend
    on how rows are split between threads.
    """
    x = as_vector(x)
    if x.shape[0] != A.n_cols:
        raise DimensionMismatchError("spmv", A.n_cols, x.shape[0])
    if A.n_rows == 0:
        return np.zeros(0, dtype=VALUE_DTYPE)

    def kernel(start: int, stop: int) -> np.ndarray:
        if start == 0 and stop == A.n_rows:
            return A.to_scipy() @ x
        return A.row_block(start, stop) @ x

    parts = map_row_blocks(A.n_rows, kernel)
    return parts[0] if len(parts) == 1 else np.concatenate(parts)


def _spmm_rows(A: SparseMatrix, B: SparseMatrix, start: int, stop: int) -> SparseMatrix:
    lo, hi = A.row_offsets[start], A.row_offsets[stop]
    a_rows = np.repeat(np.arange(stop - start, dtype=INDEX_DTYPE),
                       np.diff(A.row_offsets[start:stop + 1]))
    a_cols = A.col_indices[lo:hi]
    b_start = B.row_offsets[a_cols]
    b_len = B.row_offsets[a_cols + 1] - b_start
    total = int(b_len.sum())
    # storage position in B of every partial product
    pos = np.repeat(b_start - (np.cumsum(b_len) - b_len), b_len) + np.arange(total, dtype=INDEX_DTYPE)
    products = np.repeat(A.values[lo:hi], b_len) * B.values[pos]
    return _compress(np.repeat(a_rows, b_len), B.col_indices[pos], products, stop - start, B.n_cols)


def spmm(A: SparseMatrix, B: SparseMatrix) -> SparseMatrix:
    """
    C = A B with a structural pattern: every (i, j) reached by some path
    A[i, k] B[k, j] is stored, even if the numeric sum cancels to zero.
    C[i, j] sums its partial products in ascending k.
    """
    if A.n_cols != B.n_rows:
        raise DimensionMismatchError("spmm", A.n_cols, B.n_rows)
    blocks = map_row_blocks(A.n_rows, lambda start, stop: _spmm_rows(A, B, start, stop))
    return _stack_rows(blocks, B.n_cols)


def transpose(A: SparseMatrix) -> SparseMatrix:
    """Canonical transpose; applying it twice returns A bit-exactly."""
    transposed = A.to_scipy().transpose().tocsr()
    transposed.sort_indices()
    return SparseMatrix(A.n_cols, A.n_rows, transposed.indptr, transposed.indices, transposed.data)


def segment_reduce(values: np.ndarray, offsets: np.ndarray, fold: np.ufunc = np.add,
                   empty: float = 0.0) -> np.ndarray:
    """
    Fold ``values[offsets[k]:offsets[k+1]]`` for every segment k; empty segments give ``empty``.
    """
    n = offsets.shape[0] - 1
    out = np.full(n, empty, dtype=np.result_type(values, type(empty)))
    nonempty = offsets[1:] > offsets[:-1]
    if nonempty.any():
        out[nonempty] = fold.reduceat(values, offsets[:-1][nonempty])
    return out


MatVec = Callable[[np.ndarray], np.ndarray]
Operator = Union[SparseMatrix, MatVec]


def as_matvec(A: Operator) -> MatVec:
    """Turn a matrix or a callable into a mat-vec callable."""
    if isinstance(A, SparseMatrix):
        return lambda x: spmv(A, x)
    return A
