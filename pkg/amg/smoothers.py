"""
Relaxation methods used for pre- and post-smoothing.

Damped Jacobi takes ``omega = (4/3) / rho(D^-1 A)``, with the spectral radius
estimated from the Hessenberg matrix of a few Arnoldi steps on ``D^-1 A``.
Symmetric Gauss-Seidel is a forward then a backward sweep and runs on a
single thread.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve_triangular

from amg.errors import DimensionMismatchError, ZeroDiagonalError
from amg.sparse import SparseMatrix, as_vector, spmv
from models.config import SmootherKind

logger = logging.getLogger(__name__)

DAMPING_NUMERATOR = 4.0 / 3.0


@dataclass(frozen=True)
class SmootherState:
    """
    Setup data of one level's smoother. Immutable, shareable between solves.
    """
    kind: SmootherKind
    inv_diag: np.ndarray
    omega: float
    rho_est: Optional[float] = None
    arnoldi_m: int = 0
    lower: Optional[sp.csr_matrix] = None
    upper: Optional[sp.csr_matrix] = None


def inverse_diagonal(A: SparseMatrix) -> np.ndarray:
    diag = A.diagonal()
    zero = np.flatnonzero(diag == 0)
    if zero.shape[0]:
        raise ZeroDiagonalError(int(zero[0]))
    return 1.0 / diag


def arnoldi_spectral_radius(A: SparseMatrix, inv_diag: np.ndarray, m: int = 5, seed: int = 0) -> float:
    """
    Largest Ritz value magnitude of ``D^-1 A`` after ``m`` Arnoldi steps.

    The start vector is seeded and random. On breakdown (an invariant
    subspace) the Hessenberg matrix built so far is used.
    """
    n = A.n_rows
    m = min(m, n)
    if n == 0:
        return 1.0
    if np.array_equal(A.row_ids(), A.col_indices):
        # D^-1 A is the identity
        return 1.0

    v = np.random.default_rng(seed).standard_normal(n)
    basis = [v / np.linalg.norm(v)]
    H = np.zeros((m + 1, m))
    steps = m
    for j in range(m):
        w = inv_diag * spmv(A, basis[j])
        scale = np.linalg.norm(w)
        for i in range(j + 1):
            H[i, j] = w @ basis[i]
            w -= H[i, j] * basis[i]
        H[j + 1, j] = np.linalg.norm(w)
        if H[j + 1, j] <= 1e-14 * scale:
            steps = j + 1
            logger.debug("arnoldi breakdown after %d steps", steps)
            break
        basis.append(w / H[j + 1, j])

    ritz = scipy.linalg.eigvals(H[:steps, :steps])
    return float(np.max(np.abs(ritz)))


def setup_smoother(A: SparseMatrix, kind: SmootherKind = SmootherKind.DAMPED_JACOBI,
                   arnoldi_m: int = 5, seed: int = 0) -> SmootherState:
    """
    Prepare a smoother for A.

    Args:
        A: Square level operator with a nonzero diagonal
        kind: Relaxation method
        arnoldi_m: Arnoldi steps for the spectral radius estimate (damped Jacobi)
        seed: Seed of the Arnoldi start vector

    Returns:
        The smoother state
    """
    if A.n_rows != A.n_cols:
        raise DimensionMismatchError("smoother matrix columns", A.n_rows, A.n_cols)
    kind = SmootherKind(kind)
    inv_diag = inverse_diagonal(A)
    if kind is SmootherKind.JACOBI:
        return SmootherState(kind, inv_diag, 1.0)
    if kind is SmootherKind.DAMPED_JACOBI:
        rho = arnoldi_spectral_radius(A, inv_diag, arnoldi_m, seed)
        omega = DAMPING_NUMERATOR / rho
        logger.debug("damped jacobi: rho(D^-1 A) ~ %.6g, omega = %.6g", rho, omega)
        return SmootherState(kind, inv_diag, omega, rho_est=rho, arnoldi_m=arnoldi_m)
    csr = A.to_scipy()
    return SmootherState(kind, inv_diag, 1.0, lower=sp.tril(csr, format="csr"),
                         upper=sp.triu(csr, format="csr"))


def smooth(state: SmootherState, A: SparseMatrix, b, x) -> np.ndarray:
    """One smoothing sweep; returns the new iterate and leaves ``x`` untouched."""
    b = as_vector(b, A.n_rows, "smoother right-hand side")
    x = as_vector(x, A.n_cols, "smoother iterate")
    if state.kind is SmootherKind.SGS:
        x = x + spsolve_triangular(state.lower, b - spmv(A, x), lower=True)
        return x + spsolve_triangular(state.upper, b - spmv(A, x), lower=False)
    return x + state.omega * state.inv_diag * (b - spmv(A, x))


def smooth_times(state: SmootherState, A: SparseMatrix, b, x, sweeps: int) -> np.ndarray:
    for _ in range(sweeps):
        x = smooth(state, A, b, x)
    return x
