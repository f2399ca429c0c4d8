import inspect
from functools import wraps
from typing import Callable, Optional

from models.config import CycleConfig, SetupConfig, SolverConfig
from models.problem import ProblemSpec


def get_default_setup_config(problem: Optional[ProblemSpec] = None) -> SetupConfig:
    """
    Get the default setup configuration.
    For a generated problem the strength threshold follows its dimension.

    Args:
        problem: The generated problem, if any

    Returns:
        The default setup configuration
    """
    if problem is None:
        return SetupConfig()
    return SetupConfig(alpha=problem.default_alpha)


def use_default_config(func: Callable) -> Callable:
    """
    Decorator that fills setup_config, cycle_config and solver_config
    with defaults if they are None or not provided.

    Args:
        func: The function to decorate

    Returns:
        The decorated function
    """

    @wraps(func)
    def wrapper(*args, **kwargs):
        sig = inspect.signature(func)
        bound = sig.bind_partial(*args, **kwargs)
        if 'setup_config' in sig.parameters and bound.arguments.get('setup_config') is None:
            bound.arguments['setup_config'] = get_default_setup_config(bound.arguments.get('problem'))
        if 'cycle_config' in sig.parameters and bound.arguments.get('cycle_config') is None:
            bound.arguments['cycle_config'] = CycleConfig()
        if 'solver_config' in sig.parameters and bound.arguments.get('solver_config') is None:
            bound.arguments['solver_config'] = SolverConfig()

        return func(*bound.args, **bound.kwargs)

    return wrapper
