"""Tentative interpolation from an aggregation and a near null space vector."""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from amg.aggregation import Aggregation
from amg.errors import DimensionMismatchError, ZeroAggregateError
from amg.sparse import INDEX_DTYPE, SparseMatrix, as_vector, transpose

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NullSpace:
    """
    Near null space vector of one level.
    """
    B: np.ndarray

    def __post_init__(self):
        B = as_vector(self.B, what="near null space vector")
        if not np.isfinite(B).all():
            raise ValueError("near null space vector has non-finite entries")
        if not B.any():
            raise ValueError("near null space vector is zero")
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.B.shape[0]

    @classmethod
    def ones(cls, n: int) -> "NullSpace":
        return cls(np.ones(n))


def build_transfer(aggregation: Aggregation, nullspace: NullSpace) -> Tuple[SparseMatrix, SparseMatrix, NullSpace]:
    """
    Build P, R = P^T and the coarse near null space vector.

    B_next[J] is the 2-norm of B over aggregate J and P[i, agg[i]] is
    B[i] / B_next[agg[i]], so the columns of P are orthonormal and
    B = P B_next. Rows with B[i] == 0 get no entry at all.

    Args:
        aggregation: Fine-to-aggregate map
        nullspace: Fine near null space vector

    Returns:
        Tuple of interpolation, restriction and coarse near null space vector

    Raises:
        ZeroAggregateError: Every B entry of some aggregate is zero
    """
    B, agg = nullspace.B, aggregation.agg
    if B.shape[0] != aggregation.n_fine:
        raise DimensionMismatchError("near null space vector", aggregation.n_fine, B.shape[0])

    B_next = np.sqrt(np.bincount(agg, weights=B * B, minlength=aggregation.n_coarse))
    zero = np.flatnonzero(B_next == 0)
    if zero.shape[0]:
        raise ZeroAggregateError(int(zero[0]))

    interpolated = B != 0
    offsets = np.zeros(aggregation.n_fine + 1, dtype=INDEX_DTYPE)
    np.cumsum(interpolated, out=offsets[1:])
    cols = agg[interpolated]
    P = SparseMatrix(aggregation.n_fine, aggregation.n_coarse, offsets, cols,
                     B[interpolated] / B_next[cols])
    if not interpolated.all():
        logger.info("%d rows receive no interpolation", np.count_nonzero(~interpolated))
    return P, transpose(P), NullSpace(B_next)


def rows_without_interpolation(P: SparseMatrix) -> int:
    return int(np.count_nonzero(P.row_lengths() == 0))
