"""Deterministic replica-level parallelism.

Replica work items write into caller-owned arrays indexed by replica
number, so the merged result is independent of thread scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def default_threads() -> int:
    env = os.environ.get("SHELAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def run_replicas(fn, n: int, threads: int = 1) -> None:
    """Run fn(i) for i in range(n), possibly on a thread pool.

    ``fn`` must be pure up to writing slot i of preallocated outputs.
    """
    if threads <= 1 or n <= 1:
        for i in range(n):
            fn(i)
        return
    with ThreadPoolExecutor(max_workers=min(threads, n)) as ex:
        list(ex.map(fn, range(n)))
