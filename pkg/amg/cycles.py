"""
V-cycles, K-cycles and the hybrid policy that mixes them.

A K-cycle replaces the plain coarse correction of a V-cycle by up to two
Krylov steps on the coarse level, each preconditioned by a recursive cycle.
Under the hybrid policy the top ``k_levels`` levels use K-cycles and the
rest V-cycles. Inner cycles always start from a zero guess, and
post-smoothing uses the level's own right-hand side.
"""
import logging
from typing import Optional

import numpy as np

from amg.hierarchy import Hierarchy
from amg.smoothers import smooth_times
from amg.sparse import as_vector, spmv
from models.config import CycleConfig, CycleKind, InnerKind

logger = logging.getLogger(__name__)

V_CYCLE = CycleConfig(kind=CycleKind.V)


def _cycle_at(h: Hierarchy, k: int, b: np.ndarray, x: np.ndarray, cfg: CycleConfig) -> np.ndarray:
    if cfg.uses_kcycle(k):
        return kcycle(h, k, b, x, cfg)
    return vcycle(h, k, b, x, cfg)


def _smooth_residual(h: Hierarchy, k: int, b: np.ndarray, x: np.ndarray, cfg: CycleConfig):
    level = h.levels[k]
    x = smooth_times(level.smoother, level.A, b, x, cfg.presmooth)
    return x, spmv(level.R, b - spmv(level.A, x))


def _correct_and_smooth(h: Hierarchy, k: int, b: np.ndarray, x: np.ndarray, x_coarse: np.ndarray,
                        cfg: CycleConfig) -> np.ndarray:
    level = h.levels[k]
    x = x + spmv(level.P, x_coarse)
    return smooth_times(level.smoother, level.A, b, x, cfg.postsmooth)


def vcycle(h: Hierarchy, k: int, b, x, cfg: Optional[CycleConfig] = None) -> np.ndarray:
    """
    One V-cycle on level ``k``: pre-smooth, restrict the residual, correct
    from the coarser level (exact solve on the coarsest), post-smooth.

    Args:
        h: Hierarchy
        k: Level the cycle starts on
        b: Right-hand side on level k
        x: Initial guess on level k
        cfg: Cycle settings; the default is a pure V-cycle

    Returns:
        Updated iterate
    """
    cfg = cfg or V_CYCLE
    b = as_vector(b, h.levels[k].n, "cycle right-hand side")
    if k == h.coarsest:
        return h.coarse.solve(b)
    x = as_vector(x, h.levels[k].n, "cycle iterate")
    x, r_coarse = _smooth_residual(h, k, b, x, cfg)
    if r_coarse.any():
        x_coarse = _cycle_at(h, k + 1, r_coarse, np.zeros_like(r_coarse), cfg)
    else:
        x_coarse = np.zeros_like(r_coarse)
    return _correct_and_smooth(h, k, b, x, x_coarse, cfg)


def _krylov_correction(h: Hierarchy, k: int, r: np.ndarray, cfg: CycleConfig) -> np.ndarray:
    """Up to two preconditioned Krylov steps for A_k x = r, k below the coarsest level."""
    A = h.levels[k].A
    cg = cfg.inner is InnerKind.CG

    c = _cycle_at(h, k, r, np.zeros_like(r), cfg)
    v = spmv(A, c)
    rho1, alpha1 = (c @ v, c @ r) if cg else (v @ v, v @ r)
    if rho1 == 0:
        logger.warning("k-cycle breakdown on level %d (rho1 = 0), using the unscaled correction", k)
        return c

    r_tilde = r - (alpha1 / rho1) * v
    if np.linalg.norm(r_tilde) <= cfg.t * np.linalg.norm(r):
        return (alpha1 / rho1) * c

    d = _cycle_at(h, k, r_tilde, np.zeros_like(r), cfg)
    w = spmv(A, d)
    if cg:
        gamma, beta, alpha2 = d @ v, d @ w, d @ r_tilde
    else:
        gamma, beta, alpha2 = w @ v, w @ w, w @ r_tilde
    rho2 = beta - gamma * gamma / rho1
    if rho2 == 0:
        logger.warning("k-cycle breakdown on level %d (rho2 = 0), keeping the first inner step", k)
        return (alpha1 / rho1) * c
    return (alpha1 / rho1 - gamma * alpha2 / (rho1 * rho2)) * c + (alpha2 / rho2) * d


def kcycle(h: Hierarchy, k: int, b, x, cfg: Optional[CycleConfig] = None) -> np.ndarray:
    """
    One K-cycle on level ``k``.

    The coarse correction is exact when level k + 1 is the coarsest;
    otherwise it is built from one or two inner Krylov steps (CG or GMRES
    flavoured scalars), the second taken only when the first leaves more than
    ``t`` times the restricted residual.

    Args:
        h: Hierarchy
        k: Level the cycle starts on
        b: Right-hand side on level k
        x: Initial guess on level k
        cfg: Cycle settings; defaults to K-cycles on every level

    Returns:
        Updated iterate
    """
    cfg = cfg or CycleConfig(kind=CycleKind.K)
    b = as_vector(b, h.levels[k].n, "cycle right-hand side")
    if k == h.coarsest:
        return h.coarse.solve(b)
    x = as_vector(x, h.levels[k].n, "cycle iterate")
    x, r_coarse = _smooth_residual(h, k, b, x, cfg)
    if not r_coarse.any():
        x_coarse = np.zeros_like(r_coarse)
    elif k + 1 == h.coarsest:
        x_coarse = h.coarse.solve(r_coarse)
    else:
        x_coarse = _krylov_correction(h, k + 1, r_coarse, cfg)
    return _correct_and_smooth(h, k, b, x, x_coarse, cfg)


def apply_preconditioner(h: Hierarchy, cfg: CycleConfig, r) -> np.ndarray:
    """z = cycle(0, r, 0) with the cycle kind chosen per level by ``cfg``."""
    r = as_vector(r, h.levels[0].n, "preconditioner input")
    return _cycle_at(h, 0, r, np.zeros_like(r), cfg)


class MultigridPreconditioner:
    """
    Callable ``r -> z`` applying one multigrid cycle, for use by the Krylov solvers.
    """

    def __init__(self, hierarchy: Hierarchy, cycle_config: Optional[CycleConfig] = None):
        self.hierarchy = hierarchy
        self.cycle_config = cycle_config or CycleConfig()
        self.applications = 0

    def __call__(self, r: np.ndarray) -> np.ndarray:
        self.applications += 1
        return apply_preconditioner(self.hierarchy, self.cycle_config, r)
