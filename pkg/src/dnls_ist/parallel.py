"""Tiny worker-pool helper.

Per-x solves spend their time in LAPACK/FFT calls that release the GIL, so a
thread pool parallelizes them without pickling; results are gathered by index,
which keeps parallel runs bitwise identical to serial ones.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def parallel_map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
