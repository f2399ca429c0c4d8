from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple, TypeVar

from core.config import get_thread_count

T = TypeVar("T")

# Rows below this count are never split across threads
MIN_ROWS_PER_BLOCK = 4096

_executor_cache: Dict[int, ThreadPoolExecutor] = {}


def get_executor(threads: int) -> ThreadPoolExecutor:
    """
    Get a thread pool with the given number of workers.
    This function caches the pools to avoid spawning new worker threads
    on every kernel call.
    :param threads:
    :return:
    """
    if threads not in _executor_cache:
        _executor_cache[threads] = ThreadPoolExecutor(max_workers=threads,
                                                      thread_name_prefix=f"amg-{threads}")
    return _executor_cache[threads]


def row_blocks(n_rows: int, threads: Optional[int] = None) -> List[Tuple[int, int]]:
    """
    Split ``range(n_rows)`` into contiguous half-open blocks, one per worker.

    Args:
        n_rows: Number of rows to split
        threads: Worker count; defaults to the global thread cap

    Returns:
        List of (start, stop) pairs covering every row exactly once, in order
    """
    threads = get_thread_count() if threads is None else threads
    n_blocks = max(1, min(threads, n_rows // MIN_ROWS_PER_BLOCK))
    bounds = [n_rows * b // n_blocks for b in range(n_blocks + 1)]
    return [(bounds[b], bounds[b + 1]) for b in range(n_blocks)]


def map_row_blocks(n_rows: int, kernel: Callable[[int, int], T]) -> List[T]:
    """
    Run ``kernel(start, stop)`` over the row blocks of the current thread cap.

    Each block is computed independently, and results come back in row order,
    so the concatenated output does not depend on the number of threads.
    """
    blocks = row_blocks(n_rows)
    if len(blocks) == 1:
        return [kernel(*blocks[0])]
    executor = get_executor(get_thread_count())
    return list(executor.map(lambda block: kernel(*block), blocks))
