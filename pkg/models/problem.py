from dataclasses import dataclass
from enum import Enum
from typing import Optional


class ProblemKind(str, Enum):
    POISSON2D = "poisson2d"
    POISSON3D = "poisson3d"


@dataclass(frozen=True)
class ProblemSpec:
    """
    Represents a finite-difference Poisson benchmark problem.
    """
    kind: ProblemKind
    nx: int
    ny: int = 1
    nz: int = 1
    epsilon: float = 0.01
    orientation: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ProblemKind(self.kind))
        if min(self.nx, self.ny, self.nz) < 1:
            raise ValueError(f"grid counts must be >= 1, got {(self.nx, self.ny, self.nz)}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        axes = ("x", "y") if self.kind is ProblemKind.POISSON2D else ("x", "y", "z")
        if self.orientation is None:
            object.__setattr__(self, "orientation", axes[-1])
        elif self.orientation not in axes:
            raise ValueError(f"orientation {self.orientation!r} is not an axis of {self.kind.value}")
        if self.kind is ProblemKind.POISSON2D and self.nz != 1:
            raise ValueError("poisson2d takes no nz")

    @property
    def dimension(self) -> int:
        return 2 if self.kind is ProblemKind.POISSON2D else 3

    @property
    def n_unknowns(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def default_alpha(self) -> float:
        """Strength threshold matching the problem dimension."""
        return 0.25 if self.dimension == 2 else 0.5
