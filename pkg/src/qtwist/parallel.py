"""Order-preserving map over independent evaluations.

``QTWIST_THREADS`` caps the worker count; unset or 1 runs serially.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QTWIST_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items) -> list:
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
