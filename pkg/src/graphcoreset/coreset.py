"""Sensitivity-based coreset construction for k-median on graph metrics.

The pipeline: a multi-round, distance-proportional oversampler produces a
bicriteria center set F; iterating it against the original data shrinks
the support while conserving total weight; a single-swap local search
over support(F) yields an approximate solution C*, whose clustering
defines per-point importances; the coreset is then drawn by importance
sampling with inverse-probability weights, which keeps the cost estimate
unbiased for every fixed center set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import as_seed_sequence, spawn_seeds
from .clustering import LocalSearchConfig, local_search
from .graph import CenterSet, Graph, InfiniteCostError, WeightedPointSet, assign, cost, multi_source_dijkstra, write_point_csv


@dataclass(frozen=True)
class BicriteriaConfig:
    """Knobs of the oversampling stage.

    outer_iterations and repetitions control how often the sampler is
    re-run (outer projection loop, best-of-m inner loop); rounds and
    samples_per_round shape one sampler run and default to
    ceil(log2 |support|) and k respectively.
    """

    outer_iterations: int = 3
    repetitions: int = 5
    rounds: int | None = None
    samples_per_round: int | None = None

    def __post_init__(self):
        if self.outer_iterations < 1 or self.repetitions < 1:
            raise ValueError("outer_iterations and repetitions must be at least 1")
        if self.rounds is not None and self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if self.samples_per_round is not None and self.samples_per_round < 1:
            raise ValueError("samples_per_round must be at least 1")


@dataclass(frozen=True)
class SensitivityVector:
    """Per-point importances and the induced sampling distribution.

    sigma aligns with the point set's entries; total is the weighted sum
    of sigma, and prob (also entry-aligned, weight included) sums to 1.
    nonempty_clusters is the number of centers that received any weight.
    """

    sigma: np.ndarray
    total: float
    prob: np.ndarray
    rho: float
    nonempty_clusters: int


@dataclass(frozen=True)
class Coreset:
    """Weighted subset of the data plus build metadata."""

    vertices: np.ndarray
    weights: np.ndarray
    seed: int | None
    sample_count: int
    k: int
    rho: float
    sigma_total: float

    @property
    def points(self) -> WeightedPointSet:
        return WeightedPointSet(self.vertices, self.weights)

    def __len__(self):
        return int(self.vertices.size)


def _default_rounds(support_size):
    return max(1, math.ceil(math.log2(max(2, support_size))))


def bicriteria_sample(g: Graph, x: WeightedPointSet, k: int, rounds=None, samples_per_round=None, seed=0) -> WeightedPointSet:
    """Multi-round oversampler for a bicriteria center set F.

    Round 1 draws up to s support points proportional to weight; every
    later round draws proportional to weight times distance to the points
    picked so far, so badly covered regions get sampled first. Draws are
    without replacement within a round, so at most rounds*s distinct
    points come back, with unit weights. Unreachable candidates (infinite
    distance) are taken before finite ones since nothing covers them yet.
    """
    if len(x) == 0:
        raise ValueError("point set must be nonempty")
    s = samples_per_round if samples_per_round is not None else k
    r = rounds if rounds is not None else _default_rounds(len(x))
    if s < 1 or r < 1:
        raise ValueError("rounds and samples_per_round must be at least 1")
    rng = np.random.default_rng(as_seed_sequence(seed))

    support = x.vertices
    in_f = np.zeros(support.size, dtype=bool)
    for rnd in range(r):
        if in_f.all():
            break
        if rnd == 0:
            score = x.weights.copy()
        else:
            dist, _ = multi_source_dijkstra(g, support[in_f])
            score = x.weights * dist[support]
        score[in_f] = 0.0
        inf_mask = np.isinf(score)
        if inf_mask.any():
            cand = np.flatnonzero(inf_mask)
            prob = x.weights[cand]
        else:
            cand = np.flatnonzero(score > 0)
            prob = score[cand]
        if cand.size == 0:
            break
        take = min(s, cand.size)
        picks = rng.choice(cand, size=take, replace=False, p=prob / prob.sum())
        in_f[picks] = True
    return WeightedPointSet(support[in_f], np.ones(int(in_f.sum())))


def bicriteria_sample_best(g: Graph, x: WeightedPointSet, k: int, repetitions: int, cfg: BicriteriaConfig | None = None, seed=0) -> WeightedPointSet:
    """Best of m oversampler runs, judged by cost(x, F).

    Sub-seeds are spawned from seed, prefix-stable in m: run j of m=10
    equals run j of m=1..10, so raising m can only improve the result.
    Ties keep the earliest run.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    cfg = cfg or BicriteriaConfig()
    children = spawn_seeds(seed, repetitions)
    best = None
    best_cost = math.inf
    for child in children:
        f = bicriteria_sample(g, x, k, cfg.rounds, cfg.samples_per_round, child)
        c = cost(g, x, f.vertices)
        if best is None or c < best_cost:
            best, best_cost = f, c
    return best


def iterated_bicriteria(g: Graph, x: WeightedPointSet, k: int, cfg: BicriteriaConfig | None = None, seed=0) -> WeightedPointSet:
    """Iterated oversampling with nearest-neighbor reweighting.

    Each outer iteration oversamples the current (weighted) set, then
    projects the ORIGINAL data onto the sample: every sampled point
    receives the total original weight of the points whose nearest sample
    it is (ties to the smaller id). Points receiving no weight are
    dropped. Projection partitions the data, so total weight is
    conserved.
    """
    cfg = cfg or BicriteriaConfig()
    children = spawn_seeds(seed, cfg.outer_iterations)
    current = x
    for child in children:
        f = bicriteria_sample_best(g, current, k, cfg.repetitions, cfg, child)
        stats = assign(g, x, f.vertices)
        keep = stats.cluster_weight > 0
        current = WeightedPointSet(stats.centers[keep], stats.cluster_weight[keep])
    return current


def sensitivities(g: Graph, x: WeightedPointSet, cstar, rho: float = 1.0) -> SensitivityVector:
    """Per-point importance upper bounds from an approximate solution.

    For each point: rho * (distance share of the total cost + inverse
    weight of its cluster). The weighted sum telescopes to exactly
    rho * (nonempty clusters + 1), and every point keeps strictly
    positive probability. A zero total cost (all points sitting on
    centers) drops the distance term.
    """
    if rho < 1:
        raise ValueError("rho must be at least 1")
    stats = assign(g, x, cstar)
    total_cost = float(np.dot(x.weights, stats.distance))
    pos = np.searchsorted(stats.centers, stats.nearest)
    inv_cluster = 1.0 / stats.cluster_weight[pos]
    if total_cost > 0:
        sigma = rho * (stats.distance / total_cost + inv_cluster)
    else:
        sigma = rho * inv_cluster
    weighted = x.weights * sigma
    total = float(weighted.sum())
    prob = weighted / total
    return SensitivityVector(
        sigma=sigma,
        total=total,
        prob=prob,
        rho=float(rho),
        nonempty_clusters=int((stats.cluster_weight > 0).sum()),
    )


def coreset_size_bound(epsilon: float, delta: float, k: int, sdim_max: int, sigma_total: float, c0: float = 1.0) -> int:
    """Advisory sample count: ceil(c0 * (sigma/eps)^2 * (k*sdim + ln(1/delta)))."""
    if not (0 < epsilon < 1):
        raise ValueError("epsilon must lie in (0, 1)")
    if not (0 < delta <= 1):
        raise ValueError("delta must lie in (0, 1]")
    if k < 1 or sdim_max < 1:
        raise ValueError("k and sdim_max must be at least 1")
    if sigma_total <= 0 or c0 <= 0:
        raise ValueError("sigma_total and c0 must be positive")
    return math.ceil(c0 * (sigma_total / epsilon) ** 2 * (k * sdim_max + math.log(1.0 / delta)))


def _pipeline(g, x, k, cfg, rho, localsearch, threads, seed_thorup, seed_search):
    f = iterated_bicriteria(g, x, k, cfg, seed_thorup)
    pool = f.vertices
    k_eff = min(k, pool.size)  # degenerate supports cannot host k distinct centers
    cstar, _ = local_search(g, f, k_eff, pool, localsearch, seed_search, threads=threads)
    return sensitivities(g, x, cstar, rho)


def _draw(x, sv, n_samples, rng):
    idx = rng.choice(len(x), size=n_samples, replace=True, p=sv.prob)
    counts = np.bincount(idx, minlength=len(x))
    nz = np.flatnonzero(counts)
    # one fused multiply/divide per distinct vertex keeps the degenerate
    # single-support case exact: count*w / (N*p) == w when p == 1
    weights = counts[nz] * x.weights[nz] / (n_samples * sv.prob[nz])
    return x.vertices[nz].copy(), weights


def build_coreset(
    g: Graph,
    x: WeightedPointSet,
    k: int,
    n_samples: int,
    cfg: BicriteriaConfig | None = None,
    rho: float = 5.0,
    seed=0,
    *,
    localsearch: LocalSearchConfig | None = None,
    threads=1,
) -> Coreset:
    """Full construction: oversample, solve on the support, compute
    importances, then draw n_samples points and reweight them by
    1/(N*p), coalescing repeated draws by summing counts.

    For every fixed center set C the expected coreset cost equals
    cost(x, C) exactly; identical seeds give bit-identical coresets.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    cfg = cfg or BicriteriaConfig()
    s_thorup, s_search, s_draw = spawn_seeds(seed, 3)
    sv = _pipeline(g, x, k, cfg, rho, localsearch, threads, s_thorup, s_search)
    vertices, weights = _draw(x, sv, n_samples, np.random.default_rng(s_draw))
    return Coreset(
        vertices=vertices,
        weights=weights,
        seed=seed if isinstance(seed, int) else None,
        sample_count=int(n_samples),
        k=int(k),
        rho=float(rho),
        sigma_total=sv.total,
    )


def build_coreset_auto(
    g: Graph,
    x: WeightedPointSet,
    k: int,
    epsilon: float,
    delta: float,
    sdim_max: int,
    c0: float = 1.0,
    cfg: BicriteriaConfig | None = None,
    rho: float = 5.0,
    seed=0,
    *,
    localsearch: LocalSearchConfig | None = None,
    threads=1,
) -> Coreset:
    """Like build_coreset, but sizes the sample from (epsilon, delta,
    sdim_max, c0) using the measured total importance."""
    cfg = cfg or BicriteriaConfig()
    s_thorup, s_search, s_draw = spawn_seeds(seed, 3)
    sv = _pipeline(g, x, k, cfg, rho, localsearch, threads, s_thorup, s_search)
    n_samples = coreset_size_bound(epsilon, delta, k, sdim_max, sv.total, c0)
    vertices, weights = _draw(x, sv, n_samples, np.random.default_rng(s_draw))
    return Coreset(
        vertices=vertices,
        weights=weights,
        seed=seed if isinstance(seed, int) else None,
        sample_count=int(n_samples),
        k=int(k),
        rho=float(rho),
        sigma_total=sv.total,
    )


def save_coreset(d: Coreset, csv_path, meta_path=None):
    """Write the coreset as vertex_id,weight CSV plus a key-value
    metadata sidecar (seed, N, k, rho, sigma_X)."""
    write_point_csv(d.vertices, d.weights, csv_path)
    if meta_path is not None:
        with open(meta_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(f"seed {d.seed if d.seed is not None else ''}\n")
            f.write(f"N {d.sample_count}\n")
            f.write(f"k {d.k}\n")
            f.write(f"rho {d.rho:.17g}\n")
            f.write(f"sigma_X {d.sigma_total:.17g}\n")


def load_coreset(csv_path, meta_path=None) -> Coreset:
    """Read a coreset CSV; metadata fields default when no sidecar given."""
    from .graph import read_point_csv

    pts = read_point_csv(csv_path)
    meta = {}
    if meta_path is not None:
        with open(meta_path, "r", encoding="utf-8") as f:
            for line in f:
                parts = line.split()
                if len(parts) == 2:
                    meta[parts[0]] = parts[1]
    return Coreset(
        vertices=pts.vertices,
        weights=pts.weights,
        seed=int(meta["seed"]) if meta.get("seed") else None,
        sample_count=int(meta.get("N", len(pts))),
        k=int(meta.get("k", 0)),
        rho=float(meta.get("rho", 0.0)),
        sigma_total=float(meta.get("sigma_X", 0.0)),
    )
