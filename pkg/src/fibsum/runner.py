"""Deterministic parallel map shared by the grid runners."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count(requested: int | None = None) -> int:
    """Worker processes to use: ``requested``, capped by FIBSUM_THREADS and the CPU count."""
    cap = os.cpu_count() or 1
    env = os.environ.get("FIBSUM_THREADS")
    if env:
        try:
            cap = min(cap, max(1, int(env)))
        except ValueError:
            pass
    if requested is None:
        return cap
    return max(1, min(requested, cap))


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """``[fn(i) for i in items]``, fanned out over processes when more than one worker is available.

    Results keep input order, so reports built from them do not depend on scheduling.
    """
    items = list(items)
    n = worker_count(workers)
    if n <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * n))))
