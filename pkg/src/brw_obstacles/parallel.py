"""Deterministic chunked scheduling of replicas.

Replicas are cut into fixed-size chunks that do not depend on the worker
count.  Each chunk writes into its own slice of preallocated output arrays,
so the assembled result is identical for any number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

CHUNK = 2048


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)


def run_chunks(total: int, job: Callable[[int, int], None], workers: int = 1, chunk: int = CHUNK) -> None:
    """Call ``job(first, count)`` for every chunk of ``range(total)``.

    ``job`` must only write to the ``[first, first + count)`` slice of its
    outputs.  Jitted kernels release the GIL, so threads run in parallel.
    """
    bounds = [(lo, min(chunk, total - lo)) for lo in range(0, total, chunk)]
    if workers <= 1 or len(bounds) <= 1:
        for lo, cnt in bounds:
            job(lo, cnt)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(job, lo, cnt) for lo, cnt in bounds]:
            fut.result()
