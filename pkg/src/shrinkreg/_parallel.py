"""Order-preserving thread map used by the Monte Carlo drivers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "SHRINKREG_THREADS"


def worker_count(threads: Optional[int] = None) -> int:
    """Explicit ``threads``, else ``$SHRINKREG_THREADS``, else the CPU count."""
    if threads is None:
        env = os.environ.get(ENV_THREADS)
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(int(threads), 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """``[fn(x) for x in items]`` evaluated on a thread pool.

    Results come back in input order, so any later reduction is independent
    of scheduling.
    """
    items = list(items)
    n = worker_count(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


def chunks(count: int, size: int):
    """Split ``range(count)`` into consecutive ranges of at most ``size``."""
    return [range(i, min(i + size, count)) for i in range(0, count, size)]
