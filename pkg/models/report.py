from dataclasses import asdict, dataclass, field
from typing import List, Optional


@dataclass
class LevelStats:
    """
    Sparsity statistics of one hierarchy level.
    """
    level: int
    unknowns: int
    nnz: int
    nnz_per_row: float
    rows_without_interpolation: int = 0


@dataclass
class HierarchyReport:
    """
    Per-level statistics plus grid and operator complexity.
    """
    levels: List[LevelStats]
    grid_complexity: float
    operator_complexity: float

    def to_records(self) -> List[dict]:
        return [asdict(stats) for stats in self.levels]

    def to_dict(self) -> dict:
        return {
            "levels": self.to_records(),
            "grid_complexity": self.grid_complexity,
            "operator_complexity": self.operator_complexity,
        }


@dataclass
class SolveReport:
    """
    Outcome of an outer Krylov solve.
    """
    method: str
    converged: bool
    iterations: int
    residual_history: List[float]
    b_norm: float
    tol: float
    setup_seconds: float = 0.0
    solve_seconds: float = 0.0
    stagnated: bool = False
    unknowns: int = 0
    hierarchy: Optional[HierarchyReport] = None
    extra: dict = field(default_factory=dict)

    @property
    def relative_residual(self) -> float:
        final = self.residual_history[-1]
        return final / self.b_norm if self.b_norm > 0 else final

    @property
    def rate_munknowns_per_second(self) -> float:
        """Millions of unknowns processed per second over setup and solve."""
        seconds = self.setup_seconds + self.solve_seconds
        return self.unknowns / seconds / 1e6 if seconds > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "converged": self.converged,
            "iterations": self.iterations,
            "relative_residual": self.relative_residual,
            "residual_history": list(self.residual_history),
            "stagnated": self.stagnated,
            "setup_seconds": self.setup_seconds,
            "solve_seconds": self.solve_seconds,
            "unknowns": self.unknowns,
            "rate_munknowns_per_second": self.rate_munknowns_per_second,
            "hierarchy": self.hierarchy.to_dict() if self.hierarchy else None,
            **self.extra,
        }
