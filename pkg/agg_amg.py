import logging
import sys
from typing import List, Optional

import yaml

from amg.errors import AmgError
from core.config import EXIT_INPUT_ERROR, parse_arguments
from tools import bench, generate, solve
from tools.report import format_bench, format_solve

logger = logging.getLogger("agg_amg")

EXIT_OK = 0
EXIT_NOT_CONVERGED = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# Command name -> (runner, formatter)
COMMANDS = {
    "generate": (generate.run, lambda result: f"wrote {result['matrix']}: {result['unknowns']} unknowns, "
                                              f"{result['nnz']} nonzeros"),
    "solve": (solve.run, format_solve),
    "bench": (bench.run, format_bench),
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = parse_arguments(argv)
    except ValueError as e:
        logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
        logger.error("%s", e)
        return EXIT_INPUT_ERROR
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, stream=sys.stderr)

    runner, formatter = COMMANDS[args.command]
    try:
        result = runner(args)
    except (AmgError, OSError, ValueError, yaml.YAMLError) as e:
        logger.error("%s failed: %s", args.command, e)
        return EXIT_INPUT_ERROR

    print(formatter(result))
    if args.command == "solve" and not result["converged"]:
        return EXIT_NOT_CONVERGED
    return EXIT_OK


if __name__ == "__main__":
    # Parse command line arguments and run the sub-command
    sys.exit(main())
