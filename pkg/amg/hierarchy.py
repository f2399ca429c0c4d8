"""
Multigrid hierarchy construction and numeric refresh.

Each level runs strength -> MIS(2) -> aggregation -> interpolation ->
Galerkin product, until the operator is small enough for the dense coarse
solve, coarsening stalls, or the level limit is reached.
"""
import logging
import warnings
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np
import scipy.linalg

from amg.aggregation import Aggregation, aggregate, mis2, neighborhood_graph
from amg.errors import DimensionMismatchError, PatternChangedError, SingularCoarseMatrixError
from amg.galerkin import GalerkinCache, galerkin_apply_cache, galerkin_build_cache, galerkin_direct
from amg.smoothers import SmootherState, setup_smoother
from amg.sparse import SparseMatrix, as_vector
from amg.strength import classic_strength
from amg.transfer import NullSpace, build_transfer, rows_without_interpolation
from models.config import SetupConfig
from models.report import HierarchyReport, LevelStats

logger = logging.getLogger(__name__)

REFRESH_METHODS = ("cached", "direct")


@dataclass(frozen=True)
class CoarseSolver:
    """
    Dense LU factorisation with partial pivoting of the coarsest operator.
    """
    lu: np.ndarray
    piv: np.ndarray

    @classmethod
    def factor(cls, A: SparseMatrix) -> "CoarseSolver":
        with warnings.catch_warnings():
            # singularity is reported below with the pivot index
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(A.to_dense())
        zero = np.flatnonzero(np.diag(lu) == 0)
        if zero.shape[0]:
            raise SingularCoarseMatrixError(int(zero[0]))
        return cls(lu, piv)

    def solve(self, b: np.ndarray) -> np.ndarray:
        return scipy.linalg.lu_solve((self.lu, self.piv), b)


@dataclass(frozen=True)
class Level:
    """
    One level of the hierarchy. P, R, smoother and aggregation are absent on
    the coarsest level.
    """
    A: SparseMatrix
    B: NullSpace
    smoother: Optional[SmootherState] = None
    P: Optional[SparseMatrix] = None
    R: Optional[SparseMatrix] = None
    aggregation: Optional[Aggregation] = None
    galerkin_cache: Optional[GalerkinCache] = None

    @property
    def n(self) -> int:
        return self.A.n_rows


@dataclass(frozen=True)
class Hierarchy:
    """
    Levels 0 (finest) to L (coarsest) and the coarse factorisation.
    """
    levels: List[Level]
    coarse: CoarseSolver
    config: SetupConfig

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def coarsest(self) -> int:
        return len(self.levels) - 1

    def operators(self) -> List[SparseMatrix]:
        return [level.A for level in self.levels]


def _coarse_operator(level_A: SparseMatrix, P: SparseMatrix, R: SparseMatrix,
                     cache: Optional[GalerkinCache]) -> SparseMatrix:
    if cache is not None:
        return galerkin_apply_cache(cache, level_A.values, P, R)
    return galerkin_direct(R, level_A, P)


def setup(A0: SparseMatrix, B0=None, config: Optional[SetupConfig] = None) -> Hierarchy:
    """
    Build the aggregation hierarchy of A0.

    Args:
        A0: Square fine operator
        B0: Near null space vector, all ones by default
        config: Setup parameters

    Returns:
        The hierarchy

    Raises:
        SingularCoarseMatrixError: The coarsest operator has a zero pivot
    """
    config = config or SetupConfig()
    if A0.n_rows != A0.n_cols:
        raise DimensionMismatchError("setup matrix columns", A0.n_rows, A0.n_cols)
    B = NullSpace.ones(A0.n_rows) if B0 is None else NullSpace(as_vector(B0, A0.n_rows, "B0"))

    levels: List[Level] = []
    A = A0
    while A.n_rows > config.coarse_size_max and len(levels) + 1 < config.max_levels:
        k = len(levels)
        strength = classic_strength(A, config.alpha, config.permissive_diagonal)
        graph = neighborhood_graph(strength)
        mis = mis2(strength, config.seed, stream=k, graph=graph)
        aggregation = aggregate(strength, mis, graph)
        if aggregation.n_coarse >= config.stall_ratio * A.n_rows:
            logger.warning("coarsening stalled at level %d (%d -> %d unknowns), stopping",
                           k, A.n_rows, aggregation.n_coarse)
            break

        P, R, B_next = build_transfer(aggregation, B)
        cache = galerkin_build_cache(aggregation, A, P) if config.reuse_caches else None
        A_next = _coarse_operator(A, P, R, cache)
        smoother = setup_smoother(A, config.smoother, config.arnoldi_m, config.seed)
        levels.append(Level(A, B, smoother, P, R, aggregation, cache))
        logger.info("level %d: %d unknowns, %d nonzeros -> %d aggregates (%d mis sweeps)",
                    k, A.n_rows, A.nnz, aggregation.n_coarse, mis.sweeps)
        A, B = A_next, B_next

    levels.append(Level(A, B))
    logger.info("level %d (coarsest): %d unknowns, %d nonzeros", len(levels) - 1, A.n_rows, A.nnz)
    return Hierarchy(levels, CoarseSolver.factor(A), config)


def refresh_values(hierarchy: Hierarchy, values, method: str = "cached") -> Hierarchy:
    """
    Recompute every operator for new level-0 values on the frozen aggregations.

    Interpolation, restriction and aggregations are reused. Coarse operators
    come from the Galerkin caches (``method="cached"``, needs a setup with
    ``reuse_caches``) or from two sparse products (``method="direct"``).
    Smoothers and the coarse factorisation are rebuilt.

    Returns:
        A new hierarchy; the input is left untouched
    """
    if method not in REFRESH_METHODS:
        raise ValueError(f"refresh method must be one of {REFRESH_METHODS}, got {method!r}")
    A0 = hierarchy.levels[0].A
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    if values.shape[0] != A0.nnz:
        raise PatternChangedError(A0.nnz, values.shape[0])
    if method == "cached" and hierarchy.n_levels > 1 and hierarchy.levels[0].galerkin_cache is None:
        raise ValueError("hierarchy has no Galerkin caches; set it up with reuse_caches "
                         "or refresh with method='direct'")

    config = hierarchy.config
    A = A0.with_values(values)
    levels: List[Level] = []
    for level in hierarchy.levels[:-1]:
        cache = level.galerkin_cache if method == "cached" else None
        A_next = _coarse_operator(A, level.P, level.R, cache)
        smoother = setup_smoother(A, config.smoother, config.arnoldi_m, config.seed)
        levels.append(replace(level, A=A, smoother=smoother))
        A = A_next
    levels.append(replace(hierarchy.levels[-1], A=A))
    return Hierarchy(levels, CoarseSolver.factor(A), config)


def hierarchy_report(hierarchy: Hierarchy) -> HierarchyReport:
    """Per-level sparsity plus grid and operator complexity."""
    stats = [
        LevelStats(
            level=k,
            unknowns=level.n,
            nnz=level.A.nnz,
            nnz_per_row=level.A.nnz_per_row,
            rows_without_interpolation=rows_without_interpolation(level.P) if level.P is not None else 0,
        )
        for k, level in enumerate(hierarchy.levels)
    ]
    fine = stats[0]
    return HierarchyReport(
        levels=stats,
        grid_complexity=sum(s.unknowns for s in stats) / fine.unknowns if fine.unknowns else 1.0,
        operator_complexity=sum(s.nnz for s in stats) / fine.nnz if fine.nnz else 1.0,
    )
