"""k-median solvers over the graph metric.

local_search is the production solver (single-swap, best improvement);
the brute_force_* functions are exhaustive oracles used as ground truth
in tests and stay deliberately independent of the sampling pipeline.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._util import thread_map
from .graph import CenterSet, Graph, WeightedPointSet, cost, multi_source_dijkstra

# chunk candidate-swap evaluation so the scratch matrix stays small
_SWAP_CHUNK = 1 << 22


@dataclass(frozen=True)
class LocalSearchConfig:
    """A swap is accepted only if it beats (1 - tau/k) times the current
    cost; iteration stops at local optimality or max_iterations."""

    tau: float = 1e-3
    max_iterations: int = 100

    def __post_init__(self):
        if not (0 < self.tau < 1):
            raise ValueError("tau must lie in (0, 1)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


def distance_rows(g: Graph, row_vertices, col_vertices, threads=1):
    """Shortest-path distances from each row vertex to each column vertex.

    One single-source Dijkstra per row; rows are independent, so they may
    be computed on a thread pool without affecting the result.
    """
    cols = np.asarray(col_vertices, dtype=np.int64)

    def one(v):
        dist, _ = multi_source_dijkstra(g, [int(v)])
        return dist[cols]

    return np.vstack(thread_map(one, list(row_vertices), threads))


def _pool_array(pool):
    p = np.unique(np.asarray(list(pool) if not isinstance(pool, np.ndarray) else pool, dtype=np.int64))
    if p.size == 0:
        raise ValueError("pool must be nonempty")
    return p


def local_search(
    g: Graph,
    x: WeightedPointSet,
    k: int,
    pool,
    cfg: LocalSearchConfig | None = None,
    seed=0,
    *,
    threads=1,
    cost_trace=None,
):
    """Single-swap local search for k-median with centers from pool.

    Starts from k centers drawn uniformly from pool (seeded) and applies
    best-improvement swaps while the best candidate beats the
    (1 - tau/k) threshold; ties between equally good swaps resolve to the
    lexicographically smallest (outgoing, incoming) id pair. Returns
    (CenterSet, cost). When cost_trace is a list, the cost after the
    initial draw and after every accepted swap is appended to it.
    """
    cfg = cfg or LocalSearchConfig()
    pool_arr = _pool_array(pool)
    if k < 1:
        raise ValueError("k must be at least 1")
    if pool_arr.size < k:
        raise ValueError(f"pool of size {pool_arr.size} cannot supply {k} centers")
    if pool_arr.max() >= g.vertex_count:
        raise ValueError("pool vertex out of range")

    rows = distance_rows(g, pool_arr, x.vertices, threads)
    w = x.weights
    rng = np.random.default_rng(seed)
    sel = np.sort(rng.choice(pool_arr.size, size=k, replace=False))
    positions = np.arange(x.vertices.size)

    def total(values):
        return float(np.dot(w, values))

    current = rows[sel]
    min1 = current.min(axis=0)
    cur_cost = total(min1)
    if cost_trace is not None:
        cost_trace.append(cur_cost)
    threshold = 1.0 - cfg.tau / k

    for _ in range(cfg.max_iterations):
        amin = current.argmin(axis=0)
        masked = current.copy()
        masked[amin, positions] = np.inf
        min2 = masked.min(axis=0)

        outside = np.setdiff1d(np.arange(pool_arr.size), sel, assume_unique=False)
        if outside.size == 0:
            break
        best_cost = math.inf
        best_swap = None
        for a in range(k):
            reduced = np.where(amin == a, min2, min1)
            step = max(1, _SWAP_CHUNK // max(1, reduced.size))
            for start in range(0, outside.size, step):
                cand = outside[start : start + step]
                vals = (np.minimum(rows[cand], reduced) * w).sum(axis=1)
                b = int(np.argmin(vals))
                if vals[b] < best_cost:
                    best_cost = float(vals[b])
                    best_swap = (a, int(cand[b]))
        if best_swap is None or not (best_cost < threshold * cur_cost):
            break
        a, b = best_swap
        sel = np.sort(np.concatenate([np.delete(sel, a), [b]]))
        current = rows[sel]
        min1 = current.min(axis=0)
        cur_cost = total(min1)
        if cost_trace is not None:
            cost_trace.append(cur_cost)

    centers = CenterSet(pool_arr[sel])
    return centers, cost(g, x, centers)


def _guarded_subset_count(n, k):
    if k < 1 or k > n:
        raise ValueError(f"k={k} is infeasible for {n} vertices")
    total = math.comb(n, k)
    if total > 10**6:
        raise ValueError(f"refusing to enumerate {total} center sets (limit 10^6)")
    return total


def brute_force_kmedian(g: Graph, x: WeightedPointSet, k: int):
    """Exact k-median optimum by enumerating every k-subset of V.

    Ties break lexicographically. Guarded to C(|V|, k) <= 10^6.
    """
    n = g.vertex_count
    _guarded_subset_count(n, k)
    rows = distance_rows(g, range(n), x.vertices)
    w = x.weights
    best_cost = math.inf
    best = None
    for combo in itertools.combinations(range(n), k):
        val = float((rows[list(combo)].min(axis=0) * w).sum())
        if val < best_cost:
            best_cost = val
            best = combo
    centers = CenterSet(np.asarray(best, dtype=np.int64))
    return centers, cost(g, x, centers)


def brute_force_sensitivity(g: Graph, x: WeightedPointSet, k: int, p: int) -> float:
    """Exact sensitivity of point p: the maximum over all k-subsets C of
    d(p, C) / cost(X, C), skipping center sets of zero cost.

    Returns 1.0 in the degenerate case where every center set has zero
    cost (then d(p, C)/cost is 1 in the limit, X being a single point).
    """
    n = g.vertex_count
    _guarded_subset_count(n, k)
    pos = np.searchsorted(x.vertices, p)
    if pos >= x.vertices.size or x.vertices[pos] != p:
        raise ValueError(f"vertex {p} is not in the point set")
    rows = distance_rows(g, range(n), x.vertices)
    w = x.weights
    best = None
    for combo in itertools.combinations(range(n), k):
        d = rows[list(combo)].min(axis=0)
        total = float(np.dot(w, d))
        if not math.isfinite(total) or total == 0.0:
            continue
        ratio = float(d[pos]) / total
        if best is None or ratio > best:
            best = ratio
    return 1.0 if best is None else best
