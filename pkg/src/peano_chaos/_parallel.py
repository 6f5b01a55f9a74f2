"""Optional thread fan-out capped by PEANO_CHAOS_THREADS."""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_cap() -> int:
    raw = os.environ.get("PEANO_CHAOS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def pmap(fn, items):
    """``list(map(fn, items))`` with results in input order."""
    items = list(items)
    n = thread_cap()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
