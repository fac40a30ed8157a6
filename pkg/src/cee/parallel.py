import os
from concurrent.futures import ProcessPoolExecutor


def max_workers() -> int:
    """Worker cap from CEE_THREADS; 1 (serial) when unset or invalid."""
    try:
        return max(1, int(os.environ.get("CEE_THREADS", "1")))
    except ValueError:
        return 1


def pmap(fn, items):
    """Order-preserving map; results are identical to the serial path."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
