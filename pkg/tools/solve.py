import argparse
import hashlib
import logging
import time
from typing import Optional, Tuple

import numpy as np

from amg.cycles import MultigridPreconditioner
from amg.hierarchy import hierarchy_report, setup
from amg.krylov import solve
from amg.mmio import read_matrix_market, read_vector
from amg.problems import generate_poisson
from amg.sparse import SparseMatrix
from core.config import VERSION, get_thread_count
from core.context import get_default_setup_config, use_default_config
from models.config import CycleConfig, SetupConfig, SmootherKind, SolverConfig
from models.manifest import RunManifest
from models.problem import ProblemSpec
from models.report import SolveReport
from tools.generate import problem_from_args
from tools.report import load_manifest, write_manifest, write_report

logger = logging.getLogger(__name__)

# Options recorded in a manifest and restored by --from-manifest
MANIFEST_OPTIONS = (
    "matrix", "rhs", "b0", "pattern_as_ones",
    "kind", "nx", "ny", "nz", "epsilon", "orientation", "random_rhs",
    "solver", "tol", "max_iters", "restart",
    "cycle", "klevels", "inner", "t",
    "smoother", "alpha", "seed", "coarse_size", "max_levels", "reuse_cache", "permissive_diagonal",
)
INPUT_ROLES = ("matrix", "rhs", "b0")


@use_default_config
def solve_system(A: SparseMatrix, b, B0=None, setup_config: Optional[SetupConfig] = None,
                 cycle_config: Optional[CycleConfig] = None, solver_config: Optional[SolverConfig] = None,
                 problem: Optional[ProblemSpec] = None) -> Tuple[np.ndarray, SolveReport]:
    """
    Build the hierarchy of A and solve A x = b preconditioned by one cycle per iteration.

    Args:
        A: System matrix
        b: Right-hand side
        B0: Near null space vector, all ones if None
        setup_config: Hierarchy setup parameters
        cycle_config: Preconditioning cycle
        solver_config: Outer Krylov solver
        problem: Generated problem the system comes from, used for default alpha

    Returns:
        Tuple of the solution and the solve report with hierarchy statistics
    """
    started = time.perf_counter()
    hierarchy = setup(A, B0, setup_config)
    setup_seconds = time.perf_counter() - started

    precond = MultigridPreconditioner(hierarchy, cycle_config)
    x, report = solve(A, b, None, precond, solver_config)
    report.setup_seconds = setup_seconds
    report.hierarchy = hierarchy_report(hierarchy)
    report.extra["cycle"] = cycle_config.kind.value
    report.extra["preconditioner_applications"] = precond.applications
    return x, report


def configs_from_args(args: argparse.Namespace, problem: Optional[ProblemSpec] = None,
                      cycle: Optional[str] = None,
                      smoother: Optional[str] = None) -> Tuple[SetupConfig, CycleConfig, SolverConfig]:
    """
    Resolve the three configuration records from parsed flags.
    Without --alpha the threshold follows the generated problem's dimension.

    Args:
        args: Parsed command line
        problem: Generated problem, if any
        cycle: Cycle kind overriding --cycle
        smoother: Smoother flag overriding --smoother

    Returns:
        Tuple of setup, cycle and solver configuration
    """
    alpha = args.alpha if args.alpha is not None else get_default_setup_config(problem).alpha
    setup_config = SetupConfig(
        alpha=alpha,
        coarse_size_max=args.coarse_size,
        max_levels=args.max_levels,
        smoother=SmootherKind.from_flag(smoother or args.smoother),
        seed=args.seed,
        reuse_caches=args.reuse_cache,
        permissive_diagonal=args.permissive_diagonal,
    )
    cycle_config = CycleConfig(kind=cycle or args.cycle, k_levels=args.klevels, t=args.t, inner=args.inner)
    solver_config = SolverConfig(method=args.solver, tol=args.tol, max_iters=args.max_iters,
                                 restart=args.restart)
    return setup_config, cycle_config, solver_config


def file_sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def build_manifest(args: argparse.Namespace, setup_config: SetupConfig,
                   problem: Optional[ProblemSpec]) -> RunManifest:
    """Record every option with its resolved value, plus hashes of the input files."""
    config = {name: getattr(args, name, None) for name in MANIFEST_OPTIONS}
    config["alpha"] = setup_config.alpha
    if problem is not None:
        config.update(kind=problem.kind.value, nx=problem.nx, ny=problem.ny, nz=problem.nz,
                      epsilon=problem.epsilon, orientation=problem.orientation)
    config["threads"] = get_thread_count()
    inputs = {role: {"path": getattr(args, role), "sha256": file_sha256(getattr(args, role))}
              for role in INPUT_ROLES if getattr(args, role, None)}
    return RunManifest(config=config, inputs=inputs, seed=setup_config.seed, version=VERSION)


def apply_manifest(args: argparse.Namespace, manifest: RunManifest) -> None:
    """Overwrite the parsed options with those recorded in a manifest."""
    for name in MANIFEST_OPTIONS:
        if name in manifest.config:
            setattr(args, name, manifest.config[name])
    args.seed = manifest.seed
    if manifest.version and manifest.version != VERSION:
        logger.warning("manifest written by version %s, running %s", manifest.version, VERSION)
    for role, recorded in manifest.inputs.items():
        path = recorded.get("path")
        if path and file_sha256(path) != recorded.get("sha256"):
            logger.warning("%s file %s changed since the manifest was written", role, path)


def load_system(args: argparse.Namespace, problem: Optional[ProblemSpec]):
    if args.matrix:
        A = read_matrix_market(args.matrix, pattern_as_ones=args.pattern_as_ones)
        b = read_vector(args.rhs) if args.rhs else np.ones(A.n_rows)
    elif problem is not None:
        A, b = generate_poisson(problem, random_rhs=args.random_rhs, seed=args.seed)
    else:
        raise ValueError("solve needs --matrix, --kind or --from-manifest")
    B0 = read_vector(args.b0) if args.b0 else None
    return A, b, B0


def run(args: argparse.Namespace) -> dict:
    """
    Run the solve command: setup, solve, report and manifest.

    Args:
        args: Parsed command line

    Returns:
        The structured report, including the manifest
    """
    if args.from_manifest:
        apply_manifest(args, load_manifest(args.from_manifest))
    problem = problem_from_args(args) if args.kind and not args.matrix else None
    A, b, B0 = load_system(args, problem)
    setup_config, cycle_config, solver_config = configs_from_args(args, problem)

    _, report = solve_system(A, b, B0, setup_config=setup_config, cycle_config=cycle_config,
                             solver_config=solver_config, problem=problem)
    manifest = build_manifest(args, setup_config, problem)
    result = report.to_dict()
    result["manifest"] = manifest.to_dict()
    if args.report:
        write_report(args.report, result)
    if args.manifest:
        write_manifest(args.manifest, manifest)
    return result
