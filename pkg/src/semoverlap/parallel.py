"""Order-preserving process pool for per-record batch work."""

from __future__ import annotations

import itertools
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Iterator, TypeVar

T = TypeVar("T")
R = TypeVar("R")

_job: Callable | None = None


def _install(job: Callable) -> None:
    global _job
    _job = job


def _run(item):
    return _job(item)


def ordered_map(job: Callable[[T], R], items: Iterable[T], workers: int = 1,
                batch_size: int = 512) -> Iterator[R]:
    """Apply ``job`` to every item, yielding results in input order.

    ``job`` is shipped to each worker once, so it may hold large read-only state
    (an embedding table). Input is consumed in batches to keep streaming.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1:
        yield from map(job, items)
        return
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
    it = iter(items)
    with ProcessPoolExecutor(workers, mp_context=ctx, initializer=_install, initargs=(job,)) as pool:
        while True:
            batch = list(itertools.islice(it, batch_size))
            if not batch:
                break
            chunk = max(1, len(batch) // (4 * workers))
            yield from pool.map(_run, batch, chunksize=chunk)
