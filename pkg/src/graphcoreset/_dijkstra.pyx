# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled multi-source Dijkstra over CSR adjacency arrays.

Keys are (distance, owner) pairs compared lexicographically, so the
returned owner of every vertex is the smallest source id among those
attaining the minimal distance. Must stay result-identical to the pure
Python fallback in _dijkstra_py.
"""

from libc.math cimport INFINITY

import numpy as np


cdef inline bint _less(double da, long long oa, double db, long long ob) noexcept nogil:
    return da < db or (da == db and oa < ob)


cdef void _run(
    const long long[::1] indptr,
    const long long[::1] indices,
    const double[::1] wts,
    const long long[::1] sources,
    const double[::1] offsets,
    double[::1] dist,
    long long[::1] owner,
    unsigned char[::1] done,
    double[::1] hd,
    long long[::1] ho,
    long long[::1] hv,
) noexcept nogil:
    cdef Py_ssize_t size = 0
    cdef Py_ssize_t i, pos, parent, child, right, e
    cdef long long u, v, o
    cdef double d, nd

    for i in range(sources.shape[0]):
        u = sources[i]
        d = offsets[i]
        if _less(d, u, dist[u], owner[u]):
            dist[u] = d
            owner[u] = u
            # push (d, u, u)
            pos = size
            size += 1
            while pos > 0:
                parent = (pos - 1) >> 1
                if _less(d, u, hd[parent], ho[parent]):
                    hd[pos] = hd[parent]
                    ho[pos] = ho[parent]
                    hv[pos] = hv[parent]
                    pos = parent
                else:
                    break
            hd[pos] = d
            ho[pos] = u
            hv[pos] = u

    while size > 0:
        d = hd[0]
        o = ho[0]
        u = hv[0]
        # pop: move the last entry to the root and sift it down
        size -= 1
        if size > 0:
            nd = hd[size]
            v = hv[size]
            i = ho[size]
            pos = 0
            while True:
                child = 2 * pos + 1
                if child >= size:
                    break
                right = child + 1
                if right < size and _less(hd[right], ho[right], hd[child], ho[child]):
                    child = right
                if _less(hd[child], ho[child], nd, i):
                    hd[pos] = hd[child]
                    ho[pos] = ho[child]
                    hv[pos] = hv[child]
                    pos = child
                else:
                    break
            hd[pos] = nd
            ho[pos] = i
            hv[pos] = v

        if done[u] or _less(dist[u], owner[u], d, o):
            continue
        done[u] = 1

        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            if done[v]:
                continue
            nd = d + wts[e]
            if _less(nd, o, dist[v], owner[v]):
                dist[v] = nd
                owner[v] = o
                # push (nd, o, v)
                pos = size
                size += 1
                while pos > 0:
                    parent = (pos - 1) >> 1
                    if _less(nd, o, hd[parent], ho[parent]):
                        hd[pos] = hd[parent]
                        ho[pos] = ho[parent]
                        hv[pos] = hv[parent]
                        pos = parent
                    else:
                        break
                hd[pos] = nd
                ho[pos] = o
                hv[pos] = v


def multi_source_dijkstra(indptr, indices, weights, sources, offsets):
    """Shortest paths from a set of offset sources over a CSR graph.

    Returns (dist, owner): dist[v] is the minimum over sources s of
    offsets[s] plus the shortest-path length s->v, owner[v] the smallest
    source id attaining it. Unreachable vertices get inf and owner -1.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, np.inf)
    owner_arr = np.full(n, -1, dtype=np.int64)
    done_arr = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t cap = indices.shape[0] + sources.shape[0] + 1
    hd_arr = np.empty(cap)
    ho_arr = np.empty(cap, dtype=np.int64)
    hv_arr = np.empty(cap, dtype=np.int64)

    cdef const long long[::1] indptr_v = indptr
    cdef const long long[::1] indices_v = indices
    cdef const double[::1] wts_v = weights
    cdef const long long[::1] sources_v = sources
    cdef const double[::1] offsets_v = offsets
    cdef double[::1] dist_v = dist_arr
    cdef long long[::1] owner_v = owner_arr
    cdef unsigned char[::1] done_v = done_arr
    cdef double[::1] hd_v = hd_arr
    cdef long long[::1] ho_v = ho_arr
    cdef long long[::1] hv_v = hv_arr

    with nogil:
        _run(indptr_v, indices_v, wts_v, sources_v, offsets_v,
             dist_v, owner_v, done_v, hd_v, ho_v, hv_v)
    return dist_arr, owner_arr
