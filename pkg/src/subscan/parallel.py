"""Thread-pool helpers with results independent of the worker count.

Work items are keyed by their index and results are collected back in index
order, so any reduction over them is identical to a sequential run.  numpy
releases the GIL inside its kernels, which is where the time goes.
"""

from __future__ import annotations

import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "SUBSCAN_THREADS"


def resolve_workers(workers: int | None) -> int:
    """Explicit value wins; else the SUBSCAN_THREADS env var; else 1."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(ENV_THREADS)
    if env:
        return max(1, int(env))
    return 1


def map_indexed(fn: Callable[[int], R], count: int, workers: int | None = None) -> list[R]:
    """[fn(0), ..., fn(count-1)], computed with up to `workers` threads."""
    nw = resolve_workers(workers)
    if nw <= 1 or count <= 1:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=nw) as ex:
        return list(ex.map(fn, range(count)))


def map_windowed(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> Iterator[R]:
    """Like map(fn, items) but parallel, keeping at most ~2*workers items in flight.

    Used where items are produced lazily from a large enumeration and must not
    all be materialized at once.  Results come back in input order.
    """
    nw = resolve_workers(workers)
    if nw <= 1:
        for item in items:
            yield fn(item)
        return
    window = 2 * nw
    with ThreadPoolExecutor(max_workers=nw) as ex:
        pending: deque = deque()
        for item in items:
            pending.append(ex.submit(fn, item))
            if len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()
