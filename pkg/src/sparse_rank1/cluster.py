"""Deflation-based sparse tensor clustering (stack, deflate, reduce, K-means).

The pipeline stacks N equally-shaped samples along a new trailing mode,
greedily extracts sparse rank-1 terms from the stacked tensor (approximation
algorithm + AM on each residual), reads the weighted sample-mode factors as
reduced features, and clusters them with K-means.  Model order is picked by a
BIC grid search and the cluster count by the gap statistic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadK, LengthMismatch, ShapeMismatch, ZeroTensor
from .factors import SparseFactorSet, SparsityBudget
from .refine import AmConfig, am_l0, random_feasible
from .approx import run_algorithm
from .tensor import DenseTensor, multilinear_value, rank1_outer

__all__ = [
    "Rank1Term",
    "DeflationModel",
    "ClusterAssignment",
    "BicScore",
    "StcConfig",
    "stack_samples",
    "deflate",
    "reduced_samples",
    "kmeans",
    "cluster_error",
    "bic",
    "select_model",
    "select_k",
    "stc_pipeline",
]


@dataclass(frozen=True)
class Rank1Term:
    factors: SparseFactorSet
    alpha: float


@dataclass(frozen=True)
class DeflationModel:
    """Greedy rank-R decomposition of a stacked tensor."""

    terms: tuple[Rank1Term, ...]
    residual_norm: float
    budget: SparsityBudget
    shape: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.terms)


@dataclass(frozen=True)
class ClusterAssignment:
    """Labels are 1..K, one per sample."""

    labels: tuple[int, ...]
    k: int

    def __post_init__(self):
        if self.k < 1 or len(self.labels) < self.k:
            raise BadK(f"K={self.k} invalid for {len(self.labels)} samples")
        if any(not 1 <= lab <= self.k for lab in self.labels):
            raise BadK("labels must lie in 1..K")


@dataclass(frozen=True)
class BicScore:
    value: float
    rank: int
    budget: SparsityBudget


def stack_samples(samples) -> DenseTensor:
    """Stack N equal-shape tensors along a new trailing sample mode."""
    samples = list(samples)
    if not samples:
        raise ShapeMismatch("need at least one sample")
    shape = samples[0].shape
    for s in samples[1:]:
        if s.shape != shape:
            raise ShapeMismatch(f"sample shapes differ: {s.shape} vs {shape}")
    flat = np.concatenate([s.data for s in samples])
    return DenseTensor(flat, shape + (len(samples),))


def _init_factors(t, budget, init_alg, rng):
    if init_alg == "random":
        return random_feasible(t.shape, budget, rng.integers(0, 2**63 - 1))
    return run_algorithm(init_alg, t, budget).factors


def deflate(
    t: DenseTensor,
    rank: int,
    budget: SparsityBudget,
    init_alg: str = "D",
    am_cfg: AmConfig = AmConfig(),
    seed: int = 0,
) -> DeflationModel:
    """Greedy rank-``rank`` deflation: approximation + AM on each residual.

    Stops early if a residual becomes exactly zero.
    """
    if rank < 1:
        raise BadK(f"rank must be >= 1, got {rank}")
    if not np.any(t.data):
        raise ZeroTensor("input tensor is zero")
    budget.validate_for(t.shape)
    rng = np.random.default_rng(seed)
    # "zero residual" at floating point: anything at rounding-noise level
    # relative to the input counts, otherwise extra terms would fit noise
    floor = 1e-14 * float(np.linalg.norm(t.data))
    residual = t
    terms = []
    for _ in range(rank):
        if float(np.linalg.norm(residual.data)) <= floor:
            break
        init = _init_factors(residual, budget, init_alg, rng)
        result, _ = am_l0(residual, budget, init, am_cfg)
        alpha = multilinear_value(residual, list(result.factors))
        terms.append(Rank1Term(result.factors, float(alpha)))
        residual = DenseTensor(
            residual.data - rank1_outer(list(result.factors), alpha).data, t.shape
        )
    res_norm = float(np.linalg.norm(residual.data))
    return DeflationModel(tuple(terms), res_norm, budget, t.shape)


def reduced_samples(model: DeflationModel) -> np.ndarray:
    """N x R feature matrix: column m is ``alpha_m`` times the sample-mode factor."""
    if not model.terms:
        raise BadK("model has no terms")
    cols = [term.alpha * term.factors[-1] for term in model.terms]
    return np.column_stack(cols)


def _wcss(points, centers, labels) -> float:
    return float(np.sum((points - centers[labels]) ** 2))


def _lloyd(points, k, rng, max_iter):
    n = points.shape[0]
    # k-means++ seeding
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = np.sum((points - centers[0]) ** 2, axis=1)
    for m in range(1, k):
        total = d2.sum()
        if total == 0.0:
            centers[m:] = points[rng.integers(n, size=k - m)]
            break
        centers[m] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - centers[m]) ** 2, axis=1))

    labels = np.zeros(n, dtype=np.intp)
    for _ in range(max_iter):
        dist = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(dist, axis=1)
        taken = set()
        for m in range(k):
            picked = new_labels == m
            if np.any(picked):
                centers[m] = points[picked].mean(axis=0)
            else:
                # re-seed an empty cluster at the farthest point; distinct
                # points when several clusters are empty at once
                order = np.argsort(-dist[np.arange(n), new_labels], kind="stable")
                far = next(int(i) for i in order if int(i) not in taken)
                taken.add(far)
                centers[m] = points[far]
                new_labels[far] = m
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return labels, _wcss(points, centers, labels)


def kmeans(points, k: int, seed, restarts: int = 10, max_iter: int = 100) -> ClusterAssignment:
    """Lloyd iterations with k-means++ seeding; best of ``restarts`` runs."""
    labels, _ = kmeans_with_wcss(points, k, seed, restarts, max_iter)
    return labels


def kmeans_with_wcss(points, k, seed, restarts=10, max_iter=100):
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if not 1 <= k <= n:
        raise BadK(f"K={k} invalid for {n} points")
    if k == 1:
        center = points.mean(axis=0)
        wcss = float(np.sum((points - center) ** 2))
        return ClusterAssignment((1,) * n, 1), wcss
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        labels, wcss = _lloyd(points, k, rng, max_iter)
        if best is None or wcss < best[1]:
            best = (labels, wcss)
    labels = tuple(int(lab) + 1 for lab in best[0])
    return ClusterAssignment(labels, k), best[1]


def cluster_error(pred: ClusterAssignment, truth: ClusterAssignment) -> float:
    """Fraction of sample pairs whose same-cluster relation disagrees."""
    a = np.asarray(pred.labels)
    b = np.asarray(truth.labels)
    if a.size != b.size:
        raise LengthMismatch(f"{a.size} vs {b.size} labels")
    n = a.size
    if n < 2:
        raise LengthMismatch("need at least two samples")
    same_a = a[:, None] == a[None, :]
    same_b = b[:, None] == b[None, :]
    iu = np.triu_indices(n, k=1)
    disagreements = int(np.count_nonzero(same_a[iu] != same_b[iu]))
    return disagreements / (n * (n - 1) // 2)


def bic(t: DenseTensor, model: DeflationModel) -> BicScore:
    """Bayesian information criterion for a fitted deflation model."""
    recon = np.zeros_like(t.data)
    nnz_total = 0
    for term in model.terms:
        recon = recon + rank1_outer(list(term.factors), term.alpha).data
        nnz_total += sum(int(np.count_nonzero(f)) for f in term.factors)
    resid2 = float(np.sum((t.data - recon) ** 2))
    total = t.size
    if resid2 == 0.0:
        return BicScore(float("-inf"), model.rank, model.budget)
    value = np.log(resid2 / total) + np.log(total) / total * nnz_total
    return BicScore(float(value), model.rank, model.budget)


def select_model(
    t: DenseTensor,
    rank_grid,
    budget_grid,
    init_alg: str = "D",
    am_cfg: AmConfig = AmConfig(),
    seed: int = 0,
):
    """BIC-minimizing (rank, budget) over the grid; ties to smaller rank then budget."""
    rank_grid = list(rank_grid)
    budget_grid = [SparsityBudget(b) if not isinstance(b, SparsityBudget) else b
                   for b in budget_grid]
    if not rank_grid or not budget_grid:
        raise BadK("grids must be nonempty")
    best = None
    for rank in rank_grid:
        for budget in budget_grid:
            model = deflate(t, rank, budget, init_alg, am_cfg, seed)
            score = bic(t, model)
            key = (score.value, rank, tuple(budget))
            if best is None or key < best[0]:
                best = (key, rank, budget, model, score)
    _, rank, budget, model, score = best
    return rank, budget, model, score


def select_k(points, k_candidates, seed, b_refs: int = 20, restarts: int = 10) -> int:
    """Gap-statistic cluster count over ascending candidates.

    ``Gap(K) = mean_b log W_ref - log W`` with B uniform reference draws in
    the bounding box; picks the smallest K with
    ``Gap(K) >= Gap(K_next) - SE(K_next)``, else the last candidate.  A zero
    within-cluster dispersion short-circuits to that candidate.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    ks = [int(k) for k in k_candidates]
    if not ks or sorted(ks) != ks:
        raise BadK("k_candidates must be nonempty and ascending")
    n = points.shape[0]
    if ks[-1] >= n or ks[0] < 1:
        raise BadK(f"candidates must lie in 1..{n - 1}")
    if len(ks) == 1:
        return ks[0]

    rng = np.random.default_rng(seed)
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    refs = [lo + (hi - lo) * rng.random(points.shape) for _ in range(b_refs)]

    gap = {}
    se = {}
    for k in ks:
        _, w = kmeans_with_wcss(points, k, rng.integers(0, 2**63 - 1), restarts)
        if w == 0.0:
            return k
        ref_logs = []
        for ref in refs:
            _, wr = kmeans_with_wcss(ref, k, rng.integers(0, 2**63 - 1), restarts)
            ref_logs.append(np.log(max(wr, np.finfo(float).tiny)))
        ref_logs = np.asarray(ref_logs)
        gap[k] = float(ref_logs.mean() - np.log(w))
        se[k] = float(ref_logs.std() * np.sqrt(1.0 + 1.0 / b_refs))

    for k, k_next in zip(ks, ks[1:]):
        if gap[k] >= gap[k_next] - se[k_next]:
            return k
    return ks[-1]


@dataclass(frozen=True)
class StcConfig:
    """Configuration for the full clustering pipeline."""

    rank_grid: tuple[int, ...] = (4, 6)
    budget_grid: tuple = ()  # tuples over d+1 modes; sample mode uncapped
    init_alg: str = "D"
    am: AmConfig = field(default_factory=AmConfig)
    # the first-max-SE gate stalls at K=2 on strongly hierarchical geometries,
    # so the default candidate list starts above it
    k_candidates: tuple[int, ...] = (3, 4, 5, 6)
    fixed_k: int | None = None
    seed: int = 0
    kmeans_restarts: int = 10
    gap_refs: int = 20


def default_budget_grid(sample_shape, n_samples: int):
    """The stock grid: caps (7,...) and (8,...) per data mode, samples uncapped."""
    d = len(sample_shape)
    grid = []
    for cap in (7, 8):
        grid.append(tuple(min(cap, n) for n in sample_shape) + (n_samples,))
    return tuple(grid)


def stc_pipeline(samples, config: StcConfig):
    """Run the full pipeline; returns (assignment, model, bic_score)."""
    samples = list(samples)
    if len(samples) < 2:
        raise BadK("need at least two samples")
    stacked = stack_samples(samples)
    n = len(samples)
    budget_grid = config.budget_grid or default_budget_grid(samples[0].shape, n)
    # child seeds keep every stage deterministic per (config, seed)
    s_model, s_gap, s_kmeans = np.random.SeedSequence(config.seed).spawn(3)
    _, _, model, score = select_model(
        stacked, config.rank_grid, budget_grid, config.init_alg, config.am, seed=s_model
    )
    points = reduced_samples(model)
    if config.fixed_k is not None:
        k = config.fixed_k
    else:
        candidates = [k for k in config.k_candidates if k < n]
        k = select_k(
            points, candidates, s_gap,
            b_refs=config.gap_refs, restarts=config.kmeans_restarts,
        )
    assignment = kmeans(points, k, s_kmeans, restarts=config.kmeans_restarts)
    return assignment, model, score
