"""Worker-count policy for the embarrassingly parallel loops."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Workers allowed by ``UDB_THREADS`` (default: all CPUs)."""
    cap = os.environ.get("UDB_THREADS")
    available = os.cpu_count() or 1
    if cap:
        try:
            return max(1, min(int(cap), available))
        except ValueError:
            pass
    return available


def map_ordered(fn, items):
    """``list(map(fn, items))``, threaded when more than one worker is allowed.

    Results come back in input order, so callers that reduce them see the
    same sequence regardless of the worker count.
    """
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
