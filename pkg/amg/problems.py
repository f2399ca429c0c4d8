"""Finite-difference Poisson benchmark problems with Dirichlet boundaries eliminated."""
import logging
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from amg.errors import GridSizeError
from amg.sparse import INDEX_DTYPE, SparseMatrix
from models.problem import ProblemKind, ProblemSpec

logger = logging.getLogger(__name__)


def _neighbour_coupling(n: int) -> sp.csr_matrix:
    """Off-diagonal part of tridiag(-1, 2, -1); boundary neighbours are eliminated."""
    if n < 2:
        return sp.csr_matrix((n, n))
    off = -np.ones(n - 1)
    return sp.diags([off, off], [-1, 1], shape=(n, n), format="csr")


def generate_poisson(spec: ProblemSpec, random_rhs: bool = False, seed: int = 0) -> Tuple[SparseMatrix, np.ndarray]:
    """
    Assemble the 5-point (2D) or 7-point (3D) anisotropic Poisson matrix.

    Unknowns are numbered with x fastest. Couplings along the weak axis are
    -epsilon, along the other axes -1, and the diagonal is twice the sum of
    the coupling magnitudes, e.g. 2(1 + epsilon) in 2D.

    Args:
        spec: Problem description
        random_rhs: Use a seeded standard-normal right-hand side
        seed: Seed of the random right-hand side

    Returns:
        Tuple of the matrix and the right-hand side (all ones by default)
    """
    dims = (spec.nx, spec.ny) if spec.kind is ProblemKind.POISSON2D else (spec.nx, spec.ny, spec.nz)
    n = spec.n_unknowns
    max_nnz = (2 * len(dims) + 1) * n
    if max_nnz >= np.iinfo(INDEX_DTYPE).max:
        raise GridSizeError(f"grid {dims} overflows the index space")

    axes = "xyz"[:len(dims)]
    weights = [spec.epsilon if axis == spec.orientation else 1.0 for axis in axes]
    offdiag = sp.csr_matrix((n, n))
    for k, (size, weight) in enumerate(zip(dims, weights)):
        # kron puts its first factor outermost, so x comes last and varies fastest
        factors = [sp.identity(d, format="csr") for d in reversed(dims)]
        factors[len(dims) - 1 - k] = _neighbour_coupling(size) * weight
        term = factors[0]
        for factor in factors[1:]:
            term = sp.kron(term, factor, format="csr")
        offdiag = offdiag + term
    # diagonal is twice the sum of the coupling weights
    A = SparseMatrix.from_scipy(offdiag + sp.identity(n, format="csr") * (2.0 * sum(weights)))

    if random_rhs:
        b = np.random.default_rng(seed).standard_normal(n)
    else:
        b = np.ones(n)
    logger.info("generated %s %s: %d unknowns, %d nonzeros", spec.kind.value, dims, n, A.nnz)
    return A, b


def expected_nnz(spec: ProblemSpec) -> int:
    """Nonzero count of the eliminated-boundary stencil matrix."""
    if spec.kind is ProblemKind.POISSON2D:
        return 5 * spec.nx * spec.ny - 2 * spec.nx - 2 * spec.ny
    nx, ny, nz = spec.nx, spec.ny, spec.nz
    return 7 * nx * ny * nz - 2 * (ny * nz + nx * nz + nx * ny)
