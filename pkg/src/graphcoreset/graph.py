"""Weighted undirected graphs and shortest-path primitives.

Vertices are dense integers 0..vertex_count-1 and adjacency is kept in
CSR form (indptr/indices/weights). Every higher-level operation in this
package (clustering cost, nearest-center assignment, sampling scores)
reduces to multi-source Dijkstra runs over these arrays, dispatched to a
compiled kernel when available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import dijkstra_kernel


class GraphParseError(ValueError):
    """Malformed graph file; the message names the offending line."""


class InfiniteCostError(RuntimeError):
    """A weighted data point is unreachable from every center."""


class Graph:
    """Immutable edge-weighted undirected graph in CSR adjacency form.

    Parallel edges are collapsed to their minimum weight and self-loops
    dropped; neither can change a shortest-path distance. The adjacency
    arrays are frozen after construction, so a Graph can be shared freely
    across threads while any number of Dijkstra runs execute on it.
    """

    __slots__ = ("vertex_count", "indptr", "indices", "weights")

    def __init__(self, vertex_count, indptr, indices, weights):
        self.vertex_count = int(vertex_count)
        self.indptr = indptr
        self.indices = indices
        self.weights = weights
        for arr in (indptr, indices, weights):
            arr.setflags(write=False)

    @classmethod
    def from_edges(cls, vertex_count, edges):
        """Build a graph from (u, v, w) triples.

        Accepts any iterable of triples or a 2d array-like with three
        columns. Ids must lie in [0, vertex_count); weights must be
        finite and nonnegative.
        """
        n = int(vertex_count)
        if n < 0:
            raise ValueError("vertex_count must be nonnegative")
        triples = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.float64)
        if triples.size == 0:
            u = np.empty(0, dtype=np.int64)
            v = np.empty(0, dtype=np.int64)
            w = np.empty(0, dtype=np.float64)
        else:
            if triples.ndim != 2 or triples.shape[1] != 3:
                raise ValueError("edges must be (u, v, w) triples")
            u = triples[:, 0].astype(np.int64)
            v = triples[:, 1].astype(np.int64)
            w = triples[:, 2].astype(np.float64)
        if u.size:
            if u.min() < 0 or v.min() < 0 or max(u.max(), v.max()) >= n:
                raise ValueError("edge endpoint out of range")
            if not np.isfinite(w).all():
                raise ValueError("edge weights must be finite")
            if w.min() < 0:
                raise ValueError("edge weights must be nonnegative")
        keep = u != v  # self-loops never affect shortest paths
        u, v, w = u[keep], v[keep], w[keep]
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        if lo.size:
            # sort by (lo, hi, w) so the first entry of each (lo, hi) group
            # carries the minimum weight of any parallel bundle
            order = np.lexsort((w, hi, lo))
            lo, hi, w = lo[order], hi[order], w[order]
            first = np.ones(lo.size, dtype=bool)
            first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
            lo, hi, w = lo[first], hi[first], w[first]
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        ww = np.concatenate([w, w])
        order = np.lexsort((dst, src))
        src, dst, ww = src[order], dst[order], ww[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, indptr, dst.astype(np.int64), ww)

    @property
    def edge_count(self):
        return int(self.indices.shape[0] // 2)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )

    def __repr__(self):
        return f"Graph(vertices={self.vertex_count}, edges={self.edge_count})"


@dataclass(frozen=True)
class WeightedPointSet:
    """Distinct vertex ids with positive weights, sorted by id."""

    vertices: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        if v.shape != w.shape or v.ndim != 1:
            raise ValueError("vertices and weights must be 1d arrays of equal length")
        order = np.argsort(v, kind="stable")
        v, w = v[order], w[order]
        if v.size and (v[1:] == v[:-1]).any():
            raise ValueError("vertex ids must be distinct")
        if not np.isfinite(w).all() or (w <= 0).any():
            raise ValueError("weights must be positive and finite")
        v.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "weights", w)

    @classmethod
    def unit(cls, vertices):
        v = np.asarray(sorted(set(int(x) for x in np.asarray(vertices).ravel())), dtype=np.int64)
        return cls(v, np.ones(v.size))

    @property
    def total_weight(self):
        return math.fsum(self.weights.tolist())

    def __len__(self):
        return int(self.vertices.size)


@dataclass(frozen=True)
class CenterSet:
    """A set of k distinct vertex ids, kept sorted."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.vertices, dtype=np.int64).ravel())
        if v.size == 0:
            raise ValueError("center set must be nonempty")
        if (v[1:] == v[:-1]).any():
            raise ValueError("center ids must be distinct")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def k(self):
        return int(self.vertices.size)


@dataclass(frozen=True)
class ClusteringStats:
    """Nearest-center assignment of a weighted point set.

    nearest/distance align with the point set's entries; cluster_weight
    aligns with centers and sums member weights per center.
    """

    centers: np.ndarray
    nearest: np.ndarray
    distance: np.ndarray
    cluster_weight: np.ndarray


def _center_array(c):
    if isinstance(c, CenterSet):
        return c.vertices
    return CenterSet(np.asarray(list(c) if not isinstance(c, np.ndarray) else c)).vertices


def _normalize_sources(g, sources):
    if isinstance(sources, CenterSet):
        src = sources.vertices.astype(np.int64)
        off = np.zeros(src.size)
    else:
        items = list(sources)
        if not items:
            raise ValueError("sources must be nonempty")
        if np.ndim(items[0]) == 0:
            src = np.asarray(items, dtype=np.int64)
            off = np.zeros(src.size)
        else:
            src = np.asarray([p[0] for p in items], dtype=np.int64)
            off = np.asarray([p[1] for p in items], dtype=np.float64)
    if src.size == 0:
        raise ValueError("sources must be nonempty")
    if src.min() < 0 or src.max() >= g.vertex_count:
        raise ValueError("source id out of range")
    if not np.isfinite(off).all() or (off < 0).any():
        raise ValueError("source offsets must be finite and nonnegative")
    # duplicate sources keep their minimum offset
    order = np.lexsort((off, src))
    src, off = src[order], off[order]
    keep = np.ones(src.size, dtype=bool)
    keep[1:] = src[1:] != src[:-1]
    return np.ascontiguousarray(src[keep]), np.ascontiguousarray(off[keep])


def multi_source_dijkstra(g: Graph, sources):
    """Distances and owners from a set of sources with optional offsets.

    sources is an iterable of vertex ids, of (vertex id, offset) pairs,
    or a CenterSet. Returns (dist, owner) arrays over all vertices:
    dist[v] = min over sources s of offset_s + d(s, v) and owner[v] the
    smallest source id attaining it; unreachable vertices get dist inf
    and owner -1.
    """
    src, off = _normalize_sources(g, sources)
    return dijkstra_kernel(g.indptr, g.indices, g.weights, src, off)


def cost(g: Graph, x: WeightedPointSet, c) -> float:
    """Weighted k-median objective: sum of weight times distance to the
    nearest center, evaluated with one multi-source Dijkstra run.

    Returns inf when some positively weighted point is unreachable.
    """
    centers = _center_array(c)
    dist, _ = multi_source_dijkstra(g, centers)
    d = dist[x.vertices]
    if np.isinf(d).any():
        return math.inf
    return float(np.dot(x.weights, d))


def assign(g: Graph, x: WeightedPointSet, c) -> ClusteringStats:
    """Nearest-center assignment for every point of x.

    Ties go to the smallest center id. Raises InfiniteCostError when a
    point is unreachable from every center.
    """
    centers = _center_array(c)
    dist, owner = multi_source_dijkstra(g, centers)
    d = dist[x.vertices]
    near = owner[x.vertices]
    if np.isinf(d).any():
        bad = int(x.vertices[int(np.argmax(np.isinf(d)))])
        raise InfiniteCostError(f"vertex {bad} is unreachable from every center")
    pos = np.searchsorted(centers, near)
    cw = np.bincount(pos, weights=x.weights, minlength=centers.size)
    return ClusteringStats(centers=centers, nearest=near, distance=d, cluster_weight=cw)


def _parse_edge_list(lines):
    us, vs, ws = [], [], []
    for lineno, raw in enumerate(lines, 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        parts = s.split()
        if len(parts) != 3:
            raise GraphParseError(f"line {lineno}: expected 'u v w', got {s!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = float(parts[2])
        except ValueError:
            raise GraphParseError(f"line {lineno}: could not parse {s!r}") from None
        if u < 0 or v < 0:
            raise GraphParseError(f"line {lineno}: negative vertex id")
        if math.isnan(w) or math.isinf(w):
            raise GraphParseError(f"line {lineno}: non-finite weight")
        if w < 0:
            raise GraphParseError(f"negative weight at line {lineno}")
        us.append(u)
        vs.append(v)
        ws.append(w)
    n = max(max(us, default=-1), max(vs, default=-1)) + 1
    return n, us, vs, ws


def _parse_dimacs(lines):
    n = None
    us, vs, ws = [], [], []
    for lineno, raw in enumerate(lines, 1):
        s = raw.strip()
        if not s or s.startswith("c"):
            continue
        parts = s.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "sp":
                raise GraphParseError(f"line {lineno}: bad problem line {s!r}")
            n = int(parts[2])
        elif parts[0] == "a":
            if n is None:
                raise GraphParseError(f"line {lineno}: arc before problem line")
            if len(parts) != 4:
                raise GraphParseError(f"line {lineno}: expected 'a u v w'")
            try:
                u, v = int(parts[1]), int(parts[2])
                w = float(parts[3])
            except ValueError:
                raise GraphParseError(f"line {lineno}: could not parse {s!r}") from None
            if not (1 <= u <= n) or not (1 <= v <= n):
                raise GraphParseError(f"line {lineno}: dangling vertex id")
            if math.isnan(w) or math.isinf(w):
                raise GraphParseError(f"line {lineno}: non-finite weight")
            if w < 0:
                raise GraphParseError(f"negative weight at line {lineno}")
            us.append(u - 1)
            vs.append(v - 1)
            ws.append(w)
        else:
            raise GraphParseError(f"line {lineno}: unrecognized record {s!r}")
    if n is None:
        raise GraphParseError("missing 'p sp n m' problem line")
    return n, us, vs, ws


_FORMATS = {
    "edge-list": _parse_edge_list,
    "edgelist": _parse_edge_list,
    "dimacs-gr": _parse_dimacs,
    "dimacs": _parse_dimacs,
}


def load_graph(path, fmt="edge-list") -> Graph:
    """Load a graph from an edge-list or DIMACS shortest-path file."""
    try:
        parser = _FORMATS[fmt]
    except KeyError:
        raise ValueError(f"unknown graph format {fmt!r}") from None
    with open(path, "r", encoding="utf-8") as f:
        n, us, vs, ws = parser(f)
    return Graph.from_edges(n, np.column_stack([us, vs, ws]) if us else [])


def write_edge_list(g: Graph, path):
    """Write the graph in the package edge-list format (one 'u v w' line
    per undirected edge, smaller endpoint first, sorted)."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for u in range(g.vertex_count):
            lo, hi = g.indptr[u], g.indptr[u + 1]
            for v, w in zip(g.indices[lo:hi].tolist(), g.weights[lo:hi].tolist()):
                if u < v:
                    f.write(f"{u} {v} {w:.17g}\n")


def write_point_csv(vertices, weights, path):
    """Write (vertex_id, weight) rows as CSV with 17 significant digits."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("vertex_id,weight\n")
        for v, w in zip(np.asarray(vertices).tolist(), np.asarray(weights).tolist()):
            f.write(f"{v},{w:.17g}\n")


def read_point_csv(path) -> WeightedPointSet:
    """Read a CSV of vertex_id[,weight] rows; missing weights default to 1."""
    vs, ws = [], []
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline()
        if header and not header.lower().startswith("vertex_id"):
            raise ValueError(f"{path}: expected a vertex_id[,weight] header")
        for lineno, raw in enumerate(f, 2):
            s = raw.strip()
            if not s:
                continue
            parts = s.split(",")
            try:
                vs.append(int(parts[0]))
                ws.append(float(parts[1]) if len(parts) > 1 and parts[1] else 1.0)
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: could not parse {s!r}") from None
    return WeightedPointSet(np.asarray(vs, dtype=np.int64), np.asarray(ws))
