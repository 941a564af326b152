"""Benchmark protocol: empirical error against random center sets, the
uniform-sampling baseline, repeated-construction averaging, and
machine-readable reports.

Costs inside a trial are evaluated from cached per-center distance rows;
with zero source offsets the minimum over cached rows is bitwise equal
to a joint multi-source Dijkstra run, so cached evaluation agrees with
cost() exactly.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._util import as_seed_sequence, spawn_seeds, thread_map
from .coreset import BicriteriaConfig, Coreset, build_coreset
from .graph import Graph, InfiniteCostError, WeightedPointSet, multi_source_dijkstra


class ZeroCostError(ValueError):
    """cost(X, C) is zero, so the relative error is undefined."""


@dataclass(frozen=True)
class ErrorTrialConfig:
    num_center_sets: int = 2000
    k: int = 5
    repetitions: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.num_center_sets < 1 or self.k < 1 or self.repetitions < 1:
            raise ValueError("all trial counts must be at least 1")


@dataclass(frozen=True)
class BenchmarkRow:
    method: str
    size: int
    mean_max_err: float
    max_errs: tuple
    t_construct_ms: float
    t_eval_ms: float


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple
    k: int
    seed: int

    def to_csv(self, zero_timings=False) -> str:
        lines = ["method,size,mean_max_err,t_construct_ms,t_eval_ms"]
        for r in self.rows:
            tc = 0.0 if zero_timings else r.t_construct_ms
            te = 0.0 if zero_timings else r.t_eval_ms
            lines.append(f"{r.method},{r.size},{r.mean_max_err:.17g},{tc:.6f},{te:.6f}")
        return "\n".join(lines) + "\n"

    def to_json(self, zero_timings=False) -> str:
        payload = {
            "k": self.k,
            "seed": self.seed,
            "rows": [
                {
                    "method": r.method,
                    "size": r.size,
                    "mean_max_err": r.mean_max_err,
                    "max_errs": list(r.max_errs),
                    "t_construct_ms": 0.0 if zero_timings else r.t_construct_ms,
                    "t_eval_ms": 0.0 if zero_timings else r.t_eval_ms,
                }
                for r in self.rows
            ],
        }
        return json.dumps(payload, indent=2) + "\n"


class CostEvaluator:
    """Caches one distance row per center, restricted to a support set.

    Rows come from the same Dijkstra kernel as cost(); evaluating a
    center set takes the pointwise minimum over its rows, which matches
    the joint multi-source run bit for bit (zero offsets).
    """

    def __init__(self, g: Graph, support_vertices, threads=1):
        self._g = g
        self._support = np.unique(np.asarray(support_vertices, dtype=np.int64))
        self._threads = threads
        self._rows = {}

    def _compute_row(self, center):
        dist, _ = multi_source_dijkstra(self._g, [int(center)])
        return dist[self._support]

    def prefetch(self, centers):
        missing = sorted({int(c) for c in centers} - self._rows.keys())
        for c, row in zip(missing, thread_map(self._compute_row, missing, self._threads)):
            self._rows[c] = row

    def row(self, center):
        c = int(center)
        if c not in self._rows:
            self._rows[c] = self._compute_row(c)
        return self._rows[c]

    def positions(self, vertices):
        pos = np.searchsorted(self._support, vertices)
        if (pos >= self._support.size).any() or (self._support[pos] != vertices).any():
            raise ValueError("vertex outside the evaluator's support")
        return pos

    def cost_at(self, positions, weights, center_ids) -> float:
        d = self.row(center_ids[0])[positions]
        for c in center_ids[1:]:
            d = np.minimum(d, self.row(c)[positions])
        if np.isinf(d).any():
            return math.inf
        return float(np.dot(weights, d))


def draw_center_sets(vertex_count: int, k: int, count: int, seed) -> list:
    """Seeded stream of center sets (k distinct vertices each), drawn
    sequentially so a shorter draw is a prefix of a longer one."""
    if k > vertex_count:
        raise ValueError(f"cannot draw {k} distinct centers from {vertex_count} vertices")
    rng = np.random.default_rng(as_seed_sequence(seed))
    return [np.sort(rng.choice(vertex_count, size=k, replace=False)) for _ in range(count)]


def empirical_error(g: Graph, x: WeightedPointSet, d, c) -> float:
    """Relative cost deviation |cost(D, C)/cost(X, C) - 1|."""
    from .graph import cost

    dx = d.points if isinstance(d, Coreset) else d
    cx = cost(g, x, c)
    if cx == 0:
        raise ZeroCostError("cost(X, C) = 0: empirical error undefined")
    if math.isinf(cx):
        raise InfiniteCostError("cost(X, C) is infinite")
    cd = cost(g, dx, c)
    return abs(cd / cx - 1.0)


def max_error_trial(g: Graph, x: WeightedPointSet, d, cfg: ErrorTrialConfig, *, threads=1) -> float:
    """Maximum empirical error over a seeded stream of random center sets."""
    dx = d.points if isinstance(d, Coreset) else d
    sets = draw_center_sets(g.vertex_count, cfg.k, cfg.num_center_sets, cfg.seed)
    ev = CostEvaluator(g, np.concatenate([x.vertices, dx.vertices]), threads)
    ev.prefetch(np.concatenate(sets))
    xpos = ev.positions(x.vertices)
    dpos = ev.positions(dx.vertices)
    worst = 0.0
    for c in sets:
        cx = ev.cost_at(xpos, x.weights, c)
        if cx == 0:
            raise ZeroCostError("cost(X, C) = 0: empirical error undefined")
        if math.isinf(cx):
            raise InfiniteCostError("cost(X, C) is infinite")
        err = abs(ev.cost_at(dpos, dx.weights, c) / cx - 1.0)
        if err > worst:
            worst = err
    return worst


def uniform_baseline(x: WeightedPointSet, size: int, seed) -> Coreset:
    """Baseline summary: points drawn without replacement proportional to
    weight, every sampled point carrying total_weight/size."""
    if size < 1:
        raise ValueError("size must be at least 1")
    take = min(size, len(x))
    rng = np.random.default_rng(as_seed_sequence(seed))
    w = x.weights
    idx = np.sort(rng.choice(len(x), size=take, replace=False, p=w / w.sum()))
    share = x.total_weight / size
    return Coreset(
        vertices=x.vertices[idx].copy(),
        weights=np.full(take, share),
        seed=seed if isinstance(seed, int) else None,
        sample_count=int(size),
        k=0,
        rho=0.0,
        sigma_total=0.0,
    )


def gen_dataset(g: Graph, scenario: str, count: int, seed, region=None, fraction: float = 0.9) -> WeightedPointSet:
    """Synthetic unit-weight datasets over the graph's vertices.

    "uniform" draws count distinct vertices uniformly; "concentrated"
    puts round(fraction*count) distinct vertices inside region and the
    rest uniformly outside it.
    """
    rng = np.random.default_rng(as_seed_sequence(seed))
    n = g.vertex_count
    if count < 1 or count > n:
        raise ValueError(f"count must lie in [1, {n}]")
    if scenario == "uniform":
        picks = rng.choice(n, size=count, replace=False)
    elif scenario == "concentrated":
        if region is None:
            raise ValueError("concentrated scenario requires a region")
        region = np.unique(np.asarray(region, dtype=np.int64))
        if region.size == 0:
            raise ValueError("region must be nonempty")
        if region.min() < 0 or region.max() >= n:
            raise ValueError("region vertex out of range")
        if not (0.0 <= fraction <= 1.0):
            raise ValueError("fraction must lie in [0, 1]")
        inside = int(round(fraction * count))
        outside = count - inside
        rest = np.setdiff1d(np.arange(n), region)
        if inside > region.size or outside > rest.size:
            raise ValueError("region too small for the requested split")
        picks = np.concatenate(
            [
                rng.choice(region, size=inside, replace=False),
                rng.choice(rest, size=outside, replace=False) if outside else np.empty(0, dtype=np.int64),
            ]
        )
    else:
        raise ValueError(f"unknown scenario {scenario!r}")
    return WeightedPointSet.unit(picks)


def run_benchmark(
    g: Graph,
    x: WeightedPointSet,
    sizes,
    k: int,
    cfg: ErrorTrialConfig,
    *,
    bicriteria: BicriteriaConfig | None = None,
    rho: float = 5.0,
    threads=1,
) -> BenchmarkReport:
    """Accuracy-vs-size comparison of the sensitivity coreset against the
    uniform baseline.

    One center-set stream is drawn from the trial seed and shared by all
    sizes, methods, and repetitions (paired comparison); per (size,
    method) the report carries the mean of the per-repetition maximum
    errors plus mean construction and evaluation wall time.
    """
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValueError("size grid must be nonempty")
    bicriteria = bicriteria or BicriteriaConfig()
    s_stream, s_builds = spawn_seeds(cfg.seed, 2)
    sets = draw_center_sets(g.vertex_count, cfg.k, cfg.num_center_sets, s_stream)

    ev = CostEvaluator(g, x.vertices, threads)
    ev.prefetch(np.concatenate(sets))
    xpos = ev.positions(x.vertices)
    x_costs = []
    for c in sets:
        cx = ev.cost_at(xpos, x.weights, c)
        if cx == 0:
            raise ZeroCostError("cost(X, C) = 0: empirical error undefined")
        if math.isinf(cx):
            raise InfiniteCostError("cost(X, C) is infinite")
        x_costs.append(cx)

    def score(d: Coreset) -> float:
        dpos = ev.positions(d.vertices)
        worst = 0.0
        for c, cx in zip(sets, x_costs):
            err = abs(ev.cost_at(dpos, d.weights, c) / cx - 1.0)
            if err > worst:
                worst = err
        return worst

    size_seeds = spawn_seeds(s_builds, len(sizes))
    rows = []
    for size, size_seed in zip(sizes, size_seeds):
        rep_seeds = spawn_seeds(size_seed, cfg.repetitions)
        per_method = {"coreset": ([], 0.0, 0.0), "uniform": ([], 0.0, 0.0)}
        for rep_seed in rep_seeds:
            s_cs, s_uni = spawn_seeds(rep_seed, 2)
            for method, builder, bseed in (
                ("coreset", lambda sd: build_coreset(g, x, k, size, bicriteria, rho, sd, threads=threads), s_cs),
                ("uniform", lambda sd: uniform_baseline(x, size, sd), s_uni),
            ):
                errs, t_c, t_e = per_method[method]
                t0 = time.perf_counter()
                d = builder(bseed)
                t1 = time.perf_counter()
                errs.append(score(d))
                t2 = time.perf_counter()
                per_method[method] = (errs, t_c + (t1 - t0), t_e + (t2 - t1))
        for method in ("coreset", "uniform"):
            errs, t_c, t_e = per_method[method]
            rows.append(
                BenchmarkRow(
                    method=method,
                    size=size,
                    mean_max_err=float(np.mean(errs)),
                    max_errs=tuple(errs),
                    t_construct_ms=1e3 * t_c / cfg.repetitions,
                    t_eval_ms=1e3 * t_e / cfg.repetitions,
                )
            )
    return BenchmarkReport(rows=tuple(rows), k=int(k), seed=cfg.seed)
