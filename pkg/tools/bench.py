import argparse
import logging
import time
from dataclasses import replace
from typing import Dict, List, Optional

from amg.errors import AmgError
from amg.galerkin import galerkin_apply_cache, galerkin_direct
from amg.hierarchy import Hierarchy, setup
from amg.problems import generate_poisson
from models.config import SetupConfig
from models.problem import ProblemKind, ProblemSpec
from tools.report import write_report
from tools.solve import configs_from_args, solve_system

logger = logging.getLogger(__name__)

REFRESH_REPEATS = 3


def _split(values: str) -> List[str]:
    return [v.strip() for v in values.split(",") if v.strip()]


def bench_problem(kind: str, size: int, epsilon: float) -> ProblemSpec:
    kind = ProblemKind(kind)
    nz = size if kind is ProblemKind.POISSON3D else 1
    return ProblemSpec(kind=kind, nx=size, ny=size, nz=nz, epsilon=epsilon)


def bench_row(args: argparse.Namespace, problem: ProblemSpec, cycle: str, smoother: str) -> dict:
    """
    Set up and solve one configuration on one generated problem.

    Errors are recorded in the row instead of raised, so a sweep continues.
    """
    row = {"kind": problem.kind.value, "size": problem.nx, "unknowns": problem.n_unknowns,
           "cycle": cycle, "smoother": smoother}
    try:
        A, b = generate_poisson(problem)
        setup_config, cycle_config, solver_config = configs_from_args(args, problem, cycle, smoother)
        _, report = solve_system(A, b, setup_config=setup_config, cycle_config=cycle_config,
                                 solver_config=solver_config, problem=problem)
    except (AmgError, ValueError, ArithmeticError, MemoryError) as e:
        logger.error("bench %s/%s size %d failed: %s", cycle, smoother, problem.nx, e)
        row["error"] = str(e)
        return row
    row.update(
        levels=len(report.hierarchy.levels),
        operator_complexity=report.hierarchy.operator_complexity,
        setup_seconds=report.setup_seconds,
        solve_seconds=report.solve_seconds,
        iterations=report.iterations,
        converged=report.converged,
        relative_residual=report.relative_residual,
        rate_munknowns_per_second=report.rate_munknowns_per_second,
    )
    return row


def grid_independence(rows: List[dict]) -> List[dict]:
    """Spread of iteration counts across sizes for every cycle/smoother pair."""
    groups: Dict[tuple, List[dict]] = {}
    for row in rows:
        groups.setdefault((row["cycle"], row["smoother"]), []).append(row)
    summary = []
    for (cycle, smoother), group in groups.items():
        iterations = [r["iterations"] for r in group if r.get("converged")]
        entry = {"cycle": cycle, "smoother": smoother, "min_iterations": None,
                 "max_iterations": None, "ratio": None}
        if iterations:
            entry.update(min_iterations=min(iterations), max_iterations=max(iterations),
                         ratio=max(iterations) / max(min(iterations), 1))
        summary.append(entry)
    return summary


def time_galerkin_refresh(hierarchy: Hierarchy, repeats: int = REFRESH_REPEATS) -> Dict[str, float]:
    """
    Best-of-``repeats`` time of recomputing every coarse operator, through the
    Galerkin caches and through two sparse products.
    """
    fine_levels = hierarchy.levels[:-1]

    def best(product) -> float:
        times = []
        for _ in range(repeats):
            started = time.perf_counter()
            for level in fine_levels:
                product(level)
            times.append(time.perf_counter() - started)
        return min(times)

    cached = best(lambda level: galerkin_apply_cache(level.galerkin_cache, level.A.values, level.P, level.R))
    direct = best(lambda level: galerkin_direct(level.R, level.A, level.P))
    return {"cached_seconds": cached, "direct_seconds": direct,
            "speedup": direct / cached if cached > 0 else float("inf")}


def refresh_bench(args: argparse.Namespace, problem: ProblemSpec,
                  setup_config: Optional[SetupConfig] = None) -> dict:
    A, _ = generate_poisson(problem)
    setup_config = setup_config or configs_from_args(
        args, problem, cycle=_split(args.cycles)[0], smoother=_split(args.smoothers)[0])[0]
    hierarchy = setup(A, config=replace(setup_config, reuse_caches=True))
    result = {"size": problem.nx, "unknowns": problem.n_unknowns, "levels": hierarchy.n_levels}
    result.update(time_galerkin_refresh(hierarchy))
    return result


def run(args: argparse.Namespace) -> dict:
    """
    Sweep grid sizes and preconditioner configurations.

    Args:
        args: Parsed command line

    Returns:
        Result rows, the grid independence summary and the optional refresh timing
    """
    sizes = [int(s) for s in _split(args.sizes)]
    if not sizes:
        raise ValueError("--sizes needs at least one grid size")
    rows = []
    for cycle in _split(args.cycles):
        for smoother in _split(args.smoothers):
            for size in sizes:
                problem = bench_problem(args.kind, size, args.epsilon)
                rows.append(bench_row(args, problem, cycle, smoother))
    result = {"rows": rows, "grid_independence": grid_independence(rows)}
    if args.refresh:
        result["refresh"] = refresh_bench(args, bench_problem(args.kind, max(sizes), args.epsilon))
    if args.output:
        write_report(args.output, result)
    return result
