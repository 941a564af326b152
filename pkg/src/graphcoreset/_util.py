"""Shared plumbing: seed-stream derivation and ordered thread maps."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np


def as_seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def spawn_seeds(seed, n):
    """Derive n independent child seeds; prefix-stable in n."""
    return as_seed_sequence(seed).spawn(n)


def thread_map(fn, items, threads):
    """Apply fn to items, preserving order; threaded when threads > 1."""
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
