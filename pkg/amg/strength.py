"""Classic strength of connection."""
import logging
from dataclasses import dataclass

import numpy as np

from amg.errors import DimensionMismatchError, ZeroDiagonalError
from amg.sparse import INDEX_DTYPE, SparseMatrix, segment_reduce

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StrengthGraph:
    """
    Directed graph of strong negative couplings.

    ``C`` has the shape of A and stores one entry per strong edge i -> j; the
    stored value is the coupling magnitude ``-sign(A_ii) A_ij``, used only as
    an edge weight when aggregating.
    """
    C: SparseMatrix
    alpha: float

    @property
    def n(self) -> int:
        return self.C.n_rows

    def empty_rows(self) -> np.ndarray:
        """Mask of nodes with no strong connection of their own."""
        return self.C.row_lengths() == 0


def _diagonal_signs(A: SparseMatrix, permissive: bool) -> np.ndarray:
    diag = A.diagonal()
    zero = np.flatnonzero(diag == 0)
    if zero.shape[0]:
        if not permissive:
            raise ZeroDiagonalError(int(zero[0]))
        logger.warning("%d zero diagonal entries (first in row %d), treating their sign as +1",
                       zero.shape[0], zero[0])
    return np.where(diag < 0, -1.0, 1.0)


def classic_strength(A: SparseMatrix, alpha: float, permissive_diagonal: bool = False) -> StrengthGraph:
    """
    Mark A[i, j] strong when ``-s_i A[i, j] > alpha * max_k(-s_i A[i, k])``.

    The maximum runs over off-diagonal entries with ``-s_i A[i, k] > 0`` and
    ``s_i = sign(A[i, i])``. Rows without such an entry have no strong
    connections. Ties at the threshold are weak.

    Args:
        A: Square matrix
        alpha: Threshold in (0, 1)
        permissive_diagonal: Treat a zero diagonal as positive instead of failing

    Returns:
        The strength graph
    """
    if A.n_rows != A.n_cols:
        raise DimensionMismatchError("strength matrix columns", A.n_rows, A.n_cols)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")

    signs = _diagonal_signs(A, permissive_diagonal)
    rows = A.row_ids()
    cols = A.col_indices
    coupling = -signs[rows] * A.values
    candidate = (rows != cols) & (coupling > 0)
    row_max = segment_reduce(np.where(candidate, coupling, 0.0), A.row_offsets, fold=np.maximum)
    strong = candidate & (coupling > alpha * row_max[rows])

    offsets = np.zeros(A.n_rows + 1, dtype=INDEX_DTYPE)
    np.cumsum(np.bincount(rows[strong], minlength=A.n_rows), out=offsets[1:])
    C = SparseMatrix(A.n_rows, A.n_cols, offsets, cols[strong], coupling[strong])
    logger.debug("strength: %d of %d entries strong (alpha=%g)", C.nnz, A.nnz, alpha)
    return StrengthGraph(C, alpha)


def influence_counts(strength: StrengthGraph) -> np.ndarray:
    """Number of nodes each node strongly influences: ``#{j : C[j, i] = 1}``."""
    return np.bincount(strength.C.col_indices, minlength=strength.n).astype(INDEX_DTYPE)
