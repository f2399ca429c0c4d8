import argparse
from pathlib import Path
from typing import Optional

from amg.mmio import write_matrix_market, write_vector
from amg.problems import generate_poisson
from models.problem import ProblemKind, ProblemSpec


def problem_from_args(args: argparse.Namespace) -> ProblemSpec:
    """
    Build the problem description from the --kind/--nx/--ny/--nz flags.
    Missing counts default to nx.

    Args:
        args: Parsed command line

    Returns:
        The problem description
    """
    if args.nx is None:
        raise ValueError("--nx is required with --kind")
    kind = ProblemKind(args.kind)
    ny = args.ny if args.ny is not None else args.nx
    if kind is ProblemKind.POISSON2D:
        if args.nz not in (None, 1):
            raise ValueError("--nz is only valid with --kind poisson3d")
        nz = 1
    else:
        nz = args.nz if args.nz is not None else args.nx
    return ProblemSpec(kind=kind, nx=args.nx, ny=ny, nz=nz, epsilon=args.epsilon,
                       orientation=args.orientation)


def generate_system(problem: ProblemSpec, output: str, rhs_output: Optional[str] = None,
                    random_rhs: bool = False, seed: int = 0) -> dict:
    """
    Write a Poisson system as Matrix Market files.

    Args:
        problem: The problem description
        output: Matrix file
        rhs_output: Right-hand side file, skipped if None
        random_rhs: Seeded random right-hand side instead of all ones
        seed: Seed of the random right-hand side

    Returns:
        Summary of the written files
    """
    A, b = generate_poisson(problem, random_rhs=random_rhs, seed=seed)
    comment = (f"{problem.kind.value} nx={problem.nx} ny={problem.ny} nz={problem.nz} "
               f"epsilon={problem.epsilon!r} orientation={problem.orientation}")
    write_matrix_market(A, output, comment=comment)
    if rhs_output:
        write_vector(rhs_output, b)
    return {
        "matrix": str(Path(output)),
        "rhs": str(Path(rhs_output)) if rhs_output else None,
        "kind": problem.kind.value,
        "unknowns": A.n_rows,
        "nnz": A.nnz,
    }


def run(args: argparse.Namespace) -> dict:
    return generate_system(problem_from_args(args), args.output, args.rhs_output,
                           random_rhs=args.random_rhs, seed=args.seed)
