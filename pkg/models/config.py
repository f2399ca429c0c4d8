from dataclasses import dataclass
from enum import Enum


class SmootherKind(str, Enum):
    JACOBI = "jacobi"
    DAMPED_JACOBI = "damped_jacobi"
    SGS = "sgs"

    @classmethod
    def from_flag(cls, flag: str) -> "SmootherKind":
        """Map the short command line spelling (``djacobi``) onto the enum."""
        return cls.DAMPED_JACOBI if flag == "djacobi" else cls(flag)


class CycleKind(str, Enum):
    V = "v"
    K = "k"
    HYBRID = "hybrid"


class InnerKind(str, Enum):
    CG = "cg"
    GMRES = "gmres"


class SolverMethod(str, Enum):
    FGMRES = "fgmres"
    PCG = "pcg"


@dataclass(frozen=True)
class SetupConfig:
    """
    Parameters of the hierarchy setup.
    """
    alpha: float = 0.25
    coarse_size_max: int = 600
    max_levels: int = 25
    smoother: SmootherKind = SmootherKind.DAMPED_JACOBI
    seed: int = 0
    reuse_caches: bool = False
    arnoldi_m: int = 5
    permissive_diagonal: bool = False
    # a level that keeps at least this share of its unknowns counts as a stall
    stall_ratio: float = 0.95

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.coarse_size_max < 1:
            raise ValueError(f"coarse_size_max must be >= 1, got {self.coarse_size_max}")
        if self.max_levels < 1:
            raise ValueError(f"max_levels must be >= 1, got {self.max_levels}")
        if not 1 <= self.arnoldi_m <= 5:
            raise ValueError(f"arnoldi_m must lie in [1, 5], got {self.arnoldi_m}")
        object.__setattr__(self, "smoother", SmootherKind(self.smoother))


@dataclass(frozen=True)
class CycleConfig:
    """
    Multigrid cycle used as preconditioner.
    """
    kind: CycleKind = CycleKind.HYBRID
    k_levels: int = 2
    t: float = 0.25
    inner: InnerKind = InnerKind.GMRES
    presmooth: int = 1
    postsmooth: int = 1

    def __post_init__(self):
        if self.k_levels < 0:
            raise ValueError(f"k_levels must be >= 0, got {self.k_levels}")
        if not 0.0 <= self.t <= 1.0:
            raise ValueError(f"t must lie in [0, 1], got {self.t}")
        if self.presmooth < 0 or self.postsmooth < 0:
            raise ValueError("smoothing sweep counts must be >= 0")
        object.__setattr__(self, "kind", CycleKind(self.kind))
        object.__setattr__(self, "inner", InnerKind(self.inner))

    def uses_kcycle(self, level: int) -> bool:
        """Whether the cycle entered at ``level`` accelerates its coarse correction."""
        if self.kind is CycleKind.K:
            return True
        if self.kind is CycleKind.V:
            return False
        return level < self.k_levels


@dataclass(frozen=True)
class SolverConfig:
    """
    Outer Krylov solver settings.
    """
    method: SolverMethod = SolverMethod.FGMRES
    tol: float = 1e-6
    max_iters: int = 200
    restart: int = 30

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.restart < 1:
            raise ValueError(f"restart must be >= 1, got {self.restart}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        object.__setattr__(self, "method", SolverMethod(self.method))
