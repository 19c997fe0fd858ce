"""Deterministic replica blocks over a thread pool.

Replicas are grouped into fixed-size blocks.  Block ``b`` always draws
from ``stream.spawn(b, role)`` and results are gathered by block index,
so output does not depend on how many threads ran the blocks.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ParameterError

__all__ = ["BLOCK_REPS", "block_sizes", "map_blocks", "default_threads"]

BLOCK_REPS = 1000
THREADS_ENV = "ENSEMBLE_LAB_THREADS"


def default_threads():
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        threads = int(raw)
    except ValueError:
        raise ParameterError(f"{THREADS_ENV} must be an integer, got {raw!r}", key="threads")
    if threads < 1:
        raise ParameterError(f"{THREADS_ENV} must be >= 1", key="threads")
    return threads


def block_sizes(reps, block=BLOCK_REPS):
    """Sizes of the consecutive blocks covering ``reps`` replicas."""
    if reps < 1:
        raise ParameterError("reps must be >= 1", key="reps")
    full, rest = divmod(int(reps), block)
    return [block] * full + ([rest] if rest else [])


def map_blocks(fn, reps, stream, role, threads=1, block=BLOCK_REPS):
    """Call ``fn(size, substream, start)`` for each block and return results in order.

    ``start`` is the global index of the block's first replica.
    """
    if threads < 1:
        raise ParameterError("threads must be >= 1", key="threads")
    sizes = block_sizes(reps, block)
    starts = [b * block for b in range(len(sizes))]
    jobs = [(size, stream.spawn(b, role), start) for b, (size, start) in enumerate(zip(sizes, starts))]
    if threads == 1 or len(jobs) == 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *job) for job in jobs]
        return [f.result() for f in futures]
