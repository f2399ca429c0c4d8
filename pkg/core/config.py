import argparse
import sys
from typing import List, Optional

VERSION = "1.0.0"

# Exit status of invalid input, shared with the entry script
EXIT_INPUT_ERROR = 3

# Global thread cap for the row-parallel kernels
_thread_count: int = 1


def set_thread_count(threads: int) -> None:
    """Set the number of worker threads used by the sparse kernels."""
    global _thread_count
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    _thread_count = int(threads)


def get_thread_count() -> int:
    """Get the current worker thread cap."""
    return _thread_count


class _ArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the input-error status."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _add_problem_arguments(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument('--kind', choices=['poisson2d', 'poisson3d'], required=required,
                        help='Synthetic problem family')
    parser.add_argument('--nx', type=int, default=None, help='Grid points along x')
    parser.add_argument('--ny', type=int, default=None, help='Grid points along y')
    parser.add_argument('--nz', type=int, default=None, help='Grid points along z (3D only)')
    parser.add_argument('--epsilon', type=float, default=0.01,
                        help='Anisotropy ratio of the weak axis (default 0.01)')
    parser.add_argument('--orientation', choices=['x', 'y', 'z'], default=None,
                        help='Axis of weak coupling (default y in 2D, z in 3D)')
    parser.add_argument('--random-rhs', action='store_true',
                        help='Use a seeded random right-hand side instead of all ones')


def _add_solver_arguments(parser: argparse.ArgumentParser, sweep: bool = False) -> None:
    parser.add_argument('--tol', type=float, default=1e-6, help='Relative residual target')
    parser.add_argument('--max-iters', type=int, default=200, help='Maximum outer iterations')
    parser.add_argument('--restart', type=int, default=30, help='FGMRES restart length')
    parser.add_argument('--solver', choices=['fgmres', 'pcg'], default='fgmres',
                        help='Outer Krylov solver')
    if not sweep:
        # bench sweeps these through --cycles / --smoothers
        parser.add_argument('--cycle', choices=['v', 'k', 'hybrid'], default='hybrid',
                            help='Multigrid cycle used as preconditioner')
        parser.add_argument('--smoother', choices=['jacobi', 'djacobi', 'sgs'], default='djacobi',
                            help='Level smoother')
    parser.add_argument('--klevels', type=int, default=2,
                        help='Levels from the top using K-cycles in hybrid mode')
    parser.add_argument('--inner', choices=['cg', 'gmres'], default='gmres',
                        help='Inner Krylov scalars of the K-cycle')
    parser.add_argument('--t', type=float, default=0.25,
                        help='Inner residual threshold of the K-cycle')
    parser.add_argument('--alpha', type=float, default=None,
                        help='Strength threshold (default 0.25, or by dimension for generated problems)')
    parser.add_argument('--seed', type=int, default=0, help='Seed for MIS and Arnoldi start vectors')
    parser.add_argument('--coarse-size', type=int, default=600,
                        help='Largest system solved directly on the coarsest level')
    parser.add_argument('--max-levels', type=int, default=25, help='Maximum hierarchy depth')
    parser.add_argument('--reuse-cache', action='store_true',
                        help='Build Galerkin caches for later value refreshes')
    parser.add_argument('--permissive-diagonal', action='store_true',
                        help='Treat zero diagonal entries as positive instead of failing')


def build_parser() -> argparse.ArgumentParser:
    """Build the command line parser with its sub-commands."""
    parser = _ArgumentParser(
        description='agg-amg - aggregation algebraic multigrid solver')
    parser.add_argument('--threads', type=int, default=1,
                        help='Cap on worker threads used by the sparse kernels')
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging verbosity')
    parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
    commands = parser.add_subparsers(dest='command', required=True)

    generate = commands.add_parser('generate', help='Write a synthetic Poisson system')
    _add_problem_arguments(generate, required=True)
    generate.add_argument('--seed', type=int, default=0, help='Seed for the random right-hand side')
    generate.add_argument('--output', required=True, help='Matrix Market file for the matrix')
    generate.add_argument('--rhs-output', default=None, help='Matrix Market file for the right-hand side')

    solve = commands.add_parser('solve', help='Set up the hierarchy and solve a system')
    solve.add_argument('--matrix', default=None, help='Matrix Market file of the system matrix')
    solve.add_argument('--rhs', default=None, help='Matrix Market array file of the right-hand side')
    solve.add_argument('--b0', default=None, help='Matrix Market array file of the near null space vector')
    solve.add_argument('--pattern-as-ones', action='store_true',
                       help='Accept pattern-only Matrix Market files with unit values')
    _add_problem_arguments(solve)
    _add_solver_arguments(solve)
    solve.add_argument('--report', default=None, help='Structured report file (.json or .yaml)')
    solve.add_argument('--manifest', default=None, help='Write the run manifest to this YAML file')
    solve.add_argument('--from-manifest', default=None, help='Replay the configuration of a manifest')

    bench = commands.add_parser('bench', help='Sweep grid sizes and preconditioner configurations')
    bench.add_argument('--kind', choices=['poisson2d', 'poisson3d'], default='poisson2d')
    bench.add_argument('--sizes', default='64,128,256', help='Comma separated grid sizes per axis')
    bench.add_argument('--epsilon', type=float, default=1.0, help='Anisotropy ratio of the weak axis')
    bench.add_argument('--cycles', default='hybrid', help='Comma separated cycle kinds')
    bench.add_argument('--smoothers', default='djacobi', help='Comma separated smoothers')
    bench.add_argument('--refresh', action='store_true',
                       help='Add the cached Galerkin refresh micro-benchmark')
    _add_solver_arguments(bench, sweep=True)
    bench.add_argument('--output', default=None, help='Structured results file (.json or .yaml)')
    return parser


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments and set global configuration."""
    parser = build_parser()
    args = parser.parse_args(argv)

    set_thread_count(args.threads)
    return args
