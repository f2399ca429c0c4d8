"""Outer Krylov solvers: restarted flexible GMRES and flexible preconditioned CG."""
import logging
import time
from typing import Callable, Optional, Tuple

import numpy as np
import scipy.linalg

from amg.errors import IndefiniteMatrixError
from amg.sparse import Operator, as_matvec, as_vector
from models.config import SolverConfig, SolverMethod
from models.report import SolveReport

logger = logging.getLogger(__name__)

Preconditioner = Callable[[np.ndarray], np.ndarray]


def _identity(r: np.ndarray) -> np.ndarray:
    return r.copy()


def _start(A: Operator, b, x0, precond: Optional[Preconditioner]):
    matvec = as_matvec(A)
    b = as_vector(b, what="right-hand side")
    x = np.zeros_like(b) if x0 is None else as_vector(x0, b.shape[0], "initial guess").copy()
    return matvec, b, x, precond or _identity


def fgmres(A: Operator, b, x0=None, precond: Optional[Preconditioner] = None,
           cfg: Optional[SolverConfig] = None) -> Tuple[np.ndarray, SolveReport]:
    """
    Right-preconditioned flexible GMRES with restarts.

    The preconditioned directions are kept, so the preconditioner may change
    from one application to the next. The residual history holds the Givens
    estimate after every iteration, with the last entry of each restart
    cycle replaced by the true residual ``||b - A x||``.

    Args:
        A: Matrix or mat-vec callable
        b: Right-hand side
        x0: Initial guess, zero by default
        precond: Preconditioner ``r -> z``, identity by default
        cfg: Tolerance, iteration limit and restart length

    Returns:
        Tuple of the solution and the solve report
    """
    cfg = cfg or SolverConfig(method=SolverMethod.FGMRES)
    started = time.perf_counter()
    matvec, b, x, precond = _start(A, b, x0, precond)
    n = b.shape[0]
    b_norm = float(np.linalg.norm(b))
    target = cfg.tol * b_norm

    r = b - matvec(x)
    beta = float(np.linalg.norm(r))
    history = [beta]
    iterations = 0
    stagnated = False
    while beta > target and iterations < cfg.max_iters:
        cycle_start = beta
        m = min(cfg.restart, cfg.max_iters - iterations)
        V = np.zeros((m + 1, n))
        Z = np.zeros((m, n))
        H = np.zeros((m + 1, m))
        cs, sn = np.zeros(m), np.zeros(m)
        g = np.zeros(m + 1)
        g[0] = beta
        V[0] = r / beta

        steps = 0
        for j in range(m):
            Z[j] = precond(V[j])
            w = matvec(Z[j])
            for i in range(j + 1):
                H[i, j] = w @ V[i]
                w -= H[i, j] * V[i]
            h_next = float(np.linalg.norm(w))
            H[j + 1, j] = h_next

            for i in range(j):
                H[i, j], H[i + 1, j] = (cs[i] * H[i, j] + sn[i] * H[i + 1, j],
                                        -sn[i] * H[i, j] + cs[i] * H[i + 1, j])
            denom = np.hypot(H[j, j], H[j + 1, j])
            cs[j], sn[j] = (H[j, j] / denom, H[j + 1, j] / denom) if denom > 0 else (1.0, 0.0)
            H[j, j], H[j + 1, j] = denom, 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]

            steps = j + 1
            iterations += 1
            history.append(abs(g[j + 1]))
            logger.debug("fgmres iteration %d: residual %.3e", iterations, history[-1])
            if history[-1] <= target or h_next == 0:
                break
            V[j + 1] = w / h_next

        y = scipy.linalg.solve_triangular(H[:steps, :steps], g[:steps])
        x = x + Z[:steps].T @ y
        r = b - matvec(x)
        beta = float(np.linalg.norm(r))
        history[-1] = beta
        if beta > target and beta >= cycle_start:
            stagnated = True
            logger.warning("fgmres stagnated: no residual decrease over a restart cycle (%.3e)", beta)
            break

    converged = beta <= target
    report = SolveReport(
        method=SolverMethod.FGMRES.value,
        converged=converged,
        iterations=iterations,
        residual_history=history,
        b_norm=b_norm,
        tol=cfg.tol,
        solve_seconds=time.perf_counter() - started,
        stagnated=stagnated,
        unknowns=n,
    )
    logger.info("fgmres %s after %d iterations, relative residual %.3e",
                "converged" if converged else "did not converge", iterations, report.relative_residual)
    return x, report


def pcg(A: Operator, b, x0=None, precond: Optional[Preconditioner] = None,
        cfg: Optional[SolverConfig] = None) -> Tuple[np.ndarray, SolveReport]:
    """
    Preconditioned conjugate gradients with the flexible direction update
    ``beta = z_new^T (r_new - r) / (z^T r)``.

    Args:
        A: Symmetric positive definite matrix or mat-vec callable
        b: Right-hand side
        x0: Initial guess, zero by default
        precond: Preconditioner ``r -> z``, identity by default
        cfg: Tolerance and iteration limit

    Returns:
        Tuple of the solution and the solve report

    Raises:
        IndefiniteMatrixError: A search direction has ``p^T A p <= 0``
    """
    cfg = cfg or SolverConfig(method=SolverMethod.PCG)
    started = time.perf_counter()
    matvec, b, x, precond = _start(A, b, x0, precond)
    b_norm = float(np.linalg.norm(b))
    target = cfg.tol * b_norm

    r = b - matvec(x)
    history = [float(np.linalg.norm(r))]
    iterations = 0
    if history[-1] > target and cfg.max_iters > 0:
        z = precond(r)
        p = z.copy()
        rz = r @ z
        while iterations < cfg.max_iters:
            q = matvec(p)
            curvature = p @ q
            if curvature <= 0:
                raise IndefiniteMatrixError(float(curvature), iterations + 1)
            step = rz / curvature
            x = x + step * p
            r_new = r - step * q
            iterations += 1
            history.append(float(np.linalg.norm(r_new)))
            logger.debug("pcg iteration %d: residual %.3e", iterations, history[-1])
            if history[-1] <= target:
                break
            z_new = precond(r_new)
            rz_new = r_new @ z_new
            if rz == 0 or rz_new == 0:
                logger.warning("pcg breakdown at iteration %d (r^T z = 0)", iterations)
                break
            p = z_new + (z_new @ (r_new - r)) / rz * p
            r, rz = r_new, rz_new

    converged = history[-1] <= target
    report = SolveReport(
        method=SolverMethod.PCG.value,
        converged=converged,
        iterations=iterations,
        residual_history=history,
        b_norm=b_norm,
        tol=cfg.tol,
        solve_seconds=time.perf_counter() - started,
        unknowns=b.shape[0],
    )
    logger.info("pcg %s after %d iterations, relative residual %.3e",
                "converged" if converged else "did not converge", iterations, report.relative_residual)
    return x, report


def solve(A: Operator, b, x0=None, precond: Optional[Preconditioner] = None,
          cfg: Optional[SolverConfig] = None) -> Tuple[np.ndarray, SolveReport]:
    """Dispatch to the method named in ``cfg``."""
    cfg = cfg or SolverConfig()
    if cfg.method is SolverMethod.PCG:
        return pcg(A, b, x0, precond, cfg)
    return fgmres(A, b, x0, precond, cfg)
