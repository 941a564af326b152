"""Pure-Python fallback for the Dijkstra kernel.

Same contract and bit-identical results as the compiled module: keys are
(distance, owner) pairs, so ties resolve to the smallest source id.
"""

import heapq

import numpy as np


def multi_source_dijkstra(indptr, indices, weights, sources, offsets):
    n = len(indptr) - 1
    dist = [float("inf")] * n
    owner = [-1] * n
    done = bytearray(n)
    indptr_l = indptr.tolist()
    indices_l = indices.tolist()
    weights_l = weights.tolist()

    heap = []
    for s, off in zip(sources.tolist(), offsets.tolist()):
        if off < dist[s] or (off == dist[s] and s < owner[s]):
            dist[s] = off
            owner[s] = s
            heapq.heappush(heap, (off, s, s))

    while heap:
        d, o, u = heapq.heappop(heap)
        if done[u] or d > dist[u] or (d == dist[u] and o > owner[u]):
            continue
        done[u] = 1
        for e in range(indptr_l[u], indptr_l[u + 1]):
            v = indices_l[e]
            if done[v]:
                continue
            nd = d + weights_l[e]
            if nd < dist[v] or (nd == dist[v] and o < owner[v]):
                dist[v] = nd
                owner[v] = o
                heapq.heappush(heap, (nd, o, v))

    return np.asarray(dist), np.asarray(owner, dtype=np.int64)
