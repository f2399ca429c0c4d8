"""
Coarse operators A_c = R A P.

Two paths produce the same pattern and, up to rounding, the same values:

* ``galerkin_direct`` multiplies out R (A P) with two sparse products.
* The cached path uses the fact that P has at most one entry per row. Fine
  entry (i, j) lands at coarse position (agg[i], agg[j]) with weight
  P[i] A[i, j] P[j]. The fine entries are sorted once by coarse position and
  the run boundaries are stored; a numeric refresh is then a gather followed
  by a segmented sum.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from amg.aggregation import Aggregation
from amg.errors import DimensionMismatchError, PatternChangedError
from amg.sparse import INDEX_DTYPE, VALUE_DTYPE, SparseMatrix, spmm
from core.pool import map_row_blocks

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GalerkinCache:
    """
    Sorting and segment indices of one level's Galerkin product.

    ``perm[:n_active]`` lists the fine entries that reach the coarse operator
    in (I, J, original position) order; the remaining positions are fine
    entries in rows without interpolation, appended so that ``perm`` stays a
    permutation of all fine entries.
    """
    perm: np.ndarray
    segment_offsets: np.ndarray
    coarse_I: np.ndarray
    coarse_J: np.ndarray
    fine_I: np.ndarray
    fine_J: np.ndarray
    fine_rows: np.ndarray
    fine_cols: np.ndarray
    n_active: int
    n_coarse: int

    @property
    def nnz_fine(self) -> int:
        return self.perm.shape[0]

    @property
    def n_segments(self) -> int:
        return self.segment_offsets.shape[0] - 1

    @property
    def coarse_offsets(self) -> np.ndarray:
        offsets = np.zeros(self.n_coarse + 1, dtype=INDEX_DTYPE)
        np.cumsum(np.bincount(self.coarse_I, minlength=self.n_coarse), out=offsets[1:])
        return offsets


def galerkin_direct(R: SparseMatrix, A: SparseMatrix, P: SparseMatrix) -> SparseMatrix:
    """Coarse operator R (A P) from two structural sparse products."""
    if R.n_cols != A.n_rows:
        raise DimensionMismatchError("galerkin restriction columns", A.n_rows, R.n_cols)
    return spmm(R, spmm(A, P))


def _interpolation_weights(P: SparseMatrix) -> np.ndarray:
    """Value of the single entry of every row of P, zero for empty rows."""
    lengths = P.row_lengths()
    if (lengths > 1).any():
        raise ValueError("interpolation must have at most one entry per row")
    weights = np.zeros(P.n_rows, dtype=VALUE_DTYPE)
    weights[lengths == 1] = P.values
    return weights


def galerkin_build_cache(aggregation: Aggregation, A: SparseMatrix,
                         P: Optional[SparseMatrix] = None) -> GalerkinCache:
    """
    Tabulate the coarse position of every fine entry and sort by it.

    Args:
        aggregation: Fine-to-aggregate map covering A
        A: Fine operator, only its pattern is used
        P: Interpolation; fine rows without an entry in P are left out of the
            coarse pattern. Without P every row takes part.

    Returns:
        The cache, reusable for any value array on A's pattern
    """
    agg = aggregation.agg
    if agg.shape[0] != A.n_rows or A.n_rows != A.n_cols:
        raise DimensionMismatchError("galerkin aggregation", A.n_rows, agg.shape[0])
    n_coarse = aggregation.n_coarse
    rows, cols = A.row_ids(), A.col_indices
    fine_I, fine_J = agg[rows], agg[cols]

    if P is None:
        active = np.ones(A.nnz, dtype=bool)
    else:
        has_row = P.row_lengths() > 0
        active = has_row[rows] & has_row[cols]
    positions = np.flatnonzero(active)
    order = np.argsort(fine_I[positions] * n_coarse + fine_J[positions], kind="stable")
    sorted_positions = positions[order]
    perm = np.concatenate([sorted_positions, np.flatnonzero(~active)]).astype(INDEX_DTYPE)

    sorted_I, sorted_J = fine_I[sorted_positions], fine_J[sorted_positions]
    n_active = sorted_positions.shape[0]
    starts = np.ones(n_active, dtype=bool)
    if n_active:
        starts[1:] = (sorted_I[1:] != sorted_I[:-1]) | (sorted_J[1:] != sorted_J[:-1])
    segment_starts = np.flatnonzero(starts)
    segment_offsets = np.append(segment_starts, n_active).astype(INDEX_DTYPE)

    logger.debug("galerkin cache: %d fine entries -> %d coarse entries", n_active, segment_starts.shape[0])
    return GalerkinCache(
        perm=perm,
        segment_offsets=segment_offsets,
        coarse_I=sorted_I[segment_starts],
        coarse_J=sorted_J[segment_starts],
        fine_I=fine_I,
        fine_J=fine_J,
        fine_rows=rows,
        fine_cols=cols,
        n_active=n_active,
        n_coarse=n_coarse,
    )


def galerkin_apply_cache(cache: GalerkinCache, A_values, P: SparseMatrix,
                         R: Optional[SparseMatrix] = None) -> SparseMatrix:
    """
    Coarse operator for new fine values on the cached pattern.

    Every fine entry is scaled by its row and column interpolation weights,
    gathered into sorted order and summed segment by segment. The summation
    order is fixed by the cache, so equal inputs give bit-identical output.

    Raises:
        PatternChangedError: ``A_values`` does not fit the cached pattern
    """
    A_values = np.asarray(A_values, dtype=VALUE_DTYPE).reshape(-1)
    if A_values.shape[0] != cache.nnz_fine:
        raise PatternChangedError(cache.nnz_fine, A_values.shape[0])
    if P.n_cols != cache.n_coarse:
        raise DimensionMismatchError("galerkin interpolation columns", cache.n_coarse, P.n_cols)
    if R is not None and R.shape != (P.n_cols, P.n_rows):
        raise DimensionMismatchError("galerkin restriction", (P.n_cols, P.n_rows), R.shape)

    weights = _interpolation_weights(P)
    products = weights[cache.fine_rows] * A_values * weights[cache.fine_cols]
    offsets = cache.coarse_offsets
    seg = cache.segment_offsets

    def kernel(start: int, stop: int) -> np.ndarray:
        lo, hi = offsets[start], offsets[stop]
        if lo == hi:
            return np.zeros(0, dtype=VALUE_DTYPE)
        first = seg[lo]
        gathered = products[cache.perm[first:seg[hi]]]
        return np.add.reduceat(gathered, seg[lo:hi] - first)

    parts = map_row_blocks(cache.n_coarse, kernel)
    values = parts[0] if len(parts) == 1 else np.concatenate(parts)
    return SparseMatrix(cache.n_coarse, cache.n_coarse, offsets, cache.coarse_J, values)
