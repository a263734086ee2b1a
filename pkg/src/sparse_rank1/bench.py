"""Experiment harness: seeded sweeps written as CSV tables.

Spec files are flat ``key = value`` text; every run is reproducible from
(spec, seed).  CSV outputs start with a comment line naming the spec kind so
the schema is self-describing.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .approx import run_algorithm, upper_bound
from .cluster import StcConfig, cluster_error, kmeans, select_k, stc_pipeline
from .errors import SpecFileError
from .factors import SparsityBudget
from .generate import gen_cluster_synthetic, gen_sparse_cp
from .refine import AmConfig, am_l0, am_l1, random_feasible
from .tensor import multilinear_value

__all__ = [
    "ExperimentSpec",
    "parse_spec_file",
    "run_experiment",
    "run_spec_to_csv",
    "write_csv",
    "run_rank1_sweep",
    "run_sparsity_sweep",
    "run_am_comparison",
    "run_l1_comparison",
    "run_clustering_experiment",
]

KINDS = ("rank1-sweep", "sparsity-sweep", "am-comparison", "l1-comparison", "clustering")

CSV_VERSION = 1


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: a kind plus the grids and seeds it sweeps over."""

    kind: str
    seed: int = 0
    out: str | None = None
    instances: int = 10
    order: int = 3
    dims: tuple[int, ...] = (10, 20, 30)
    dim: int = 30
    ratios: tuple[float, ...] = (0.1, 0.3, 0.5, 0.7, 0.9)
    sr: float = 0.7
    rank: int = 10
    budget_frac: float = 0.3
    rho: float = 0.2
    tol: float = 1e-5
    max_sweeps: int = 2000
    sizes: tuple[int, ...] = (20,)
    noise: tuple[float, ...] = (0.1, 0.5, 0.9)
    mu: float = 0.5
    ranks: tuple[int, ...] = (4, 6)
    caps: tuple[int, ...] = (7, 8)
    k_candidates: tuple[int, ...] = (3, 4, 5, 6)
    methods: tuple[str, ...] = ("A", "B", "C", "D", "vanilla")

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecFileError(f"unknown kind {self.kind!r}; expected one of {KINDS}")
        if self.instances < 1:
            raise SpecFileError("instances must be >= 1")
        grids = {
            "rank1-sweep": ("dims",),
            "sparsity-sweep": ("ratios",),
            "am-comparison": ("dims",),
            "l1-comparison": ("dims",),
            "clustering": ("sizes", "noise", "ranks", "caps", "methods"),
        }
        for field_name in grids[self.kind]:
            if not getattr(self, field_name):
                raise SpecFileError(f"{field_name} must be nonempty for {self.kind}")


def _int_tuple(text):
    return tuple(int(v) for v in text.split(","))


def _float_tuple(text):
    return tuple(float(v) for v in text.split(","))


def _str_tuple(text):
    return tuple(v.strip() for v in text.split(","))


_PARSERS = {
    "kind": str,
    "seed": int,
    "out": str,
    "instances": int,
    "order": int,
    "dims": _int_tuple,
    "dim": int,
    "ratios": _float_tuple,
    "sr": float,
    "rank": int,
    "budget_frac": float,
    "rho": float,
    "tol": float,
    "max_sweeps": int,
    "sizes": _int_tuple,
    "noise": _float_tuple,
    "mu": float,
    "ranks": _int_tuple,
    "caps": _int_tuple,
    "k_candidates": _int_tuple,
    "methods": _str_tuple,
}


def parse_spec_file(path) -> ExperimentSpec:
    """Parse a flat ``key = value`` spec file ('#' starts a comment)."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecFileError(f"{path}:{lineno}: expected 'key = value'")
        key, _, text = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _PARSERS:
            raise SpecFileError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](text.strip())
        except ValueError as exc:
            raise SpecFileError(f"{path}:{lineno}: {exc}") from None
    if "kind" not in values:
        raise SpecFileError(f"{path}: missing required key 'kind'")
    return ExperimentSpec(**values)


def _instance_seed(spec: ExperimentSpec, *key) -> np.random.SeedSequence:
    return np.random.SeedSequence(spec.seed, spawn_key=tuple(key))


def _sweep_budget(n: int, frac: float) -> int:
    return max(1, int(frac * n))


def _approx_row(spec, n, sr):
    """Averaged A-D values/times, the random baseline, and the upper bound."""
    algs = ("A", "B", "C", "D")
    sums = {f"value_{a.lower()}": 0.0 for a in algs}
    sums.update({f"time_{a.lower()}": 0.0 for a in algs})
    sums.update({f"ratio_{a.lower()}": 0.0 for a in algs})
    sums["value_random"] = 0.0
    sums["upper_bound"] = 0.0
    shape = (n,) * spec.order
    budget = SparsityBudget([_sweep_budget(n, 1.0 - sr)] * spec.order)
    for inst in range(spec.instances):
        ss = _instance_seed(spec, n, int(round(sr * 100)), inst)
        t = gen_sparse_cp(shape, spec.rank, sr, ss)
        vub = upper_bound(t)
        sums["upper_bound"] += vub
        rand = random_feasible(shape, budget, ss.spawn(1)[0])
        sums["value_random"] += multilinear_value(t, list(rand))
        for a in algs:
            start = time.perf_counter()
            res = run_algorithm(a, t, budget)
            elapsed = time.perf_counter() - start
            sums[f"value_{a.lower()}"] += res.value
            sums[f"time_{a.lower()}"] += elapsed
            sums[f"ratio_{a.lower()}"] += res.value / vub
    row = {k: v / spec.instances for k, v in sums.items()}
    row["n"] = n
    row["sr"] = sr
    row["budget"] = budget[0]
    return row


_APPROX_COLUMNS = [
    "n", "sr", "budget",
    "value_a", "value_b", "value_c", "value_d", "value_random", "upper_bound",
    "ratio_a", "ratio_b", "ratio_c", "ratio_d",
    "time_a", "time_b", "time_c", "time_d",
]


def run_rank1_sweep(spec: ExperimentSpec):
    rows = [_approx_row(spec, n, spec.sr) for n in spec.dims]
    return _APPROX_COLUMNS, rows


def run_sparsity_sweep(spec: ExperimentSpec):
    rows = [_approx_row(spec, spec.dim, sr) for sr in spec.ratios]
    return _APPROX_COLUMNS, rows


def _am_row(spec, n, l1: bool):
    inits = ("C", "D", "random")
    shape = (n,) * spec.order
    budget = SparsityBudget([_sweep_budget(n, spec.budget_frac)] * spec.order)
    cfg = AmConfig(tol=spec.tol, max_sweeps=spec.max_sweeps)
    sums = {}
    for name in inits:
        sums[f"value_{name}"] = 0.0
        sums[f"time_{name}"] = 0.0
        sums[f"sweeps_{name}"] = 0.0
    for inst in range(spec.instances):
        ss = _instance_seed(spec, n, inst)
        t = gen_sparse_cp(shape, spec.rank, spec.sr, ss)
        for name in inits:
            start = time.perf_counter()
            if name == "random":
                init = random_feasible(shape, budget, ss.spawn(1)[0])
            else:
                init = run_algorithm(name, t, budget).factors
            if l1:
                _, value, trace = am_l1(t, init, AmConfig(
                    tol=spec.tol, max_sweeps=spec.max_sweeps, model="l1", rho=spec.rho
                ))
            else:
                result, trace = am_l0(t, budget, init, cfg)
                value = result.value
            elapsed = time.perf_counter() - start
            sums[f"value_{name}"] += value
            sums[f"time_{name}"] += elapsed
            sums[f"sweeps_{name}"] += trace.sweeps_used
    row = {k: v / spec.instances for k, v in sums.items()}
    row["n"] = n
    row["budget"] = budget[0]
    if l1:
        row["rho"] = spec.rho
    return row


def run_am_comparison(spec: ExperimentSpec):
    cols = ["n", "budget",
            "value_C", "value_D", "value_random",
            "sweeps_C", "sweeps_D", "sweeps_random",
            "time_C", "time_D", "time_random"]
    rows = [_am_row(spec, n, l1=False) for n in spec.dims]
    return cols, rows


def run_l1_comparison(spec: ExperimentSpec):
    cols = ["n", "budget", "rho",
            "value_C", "value_D", "value_random",
            "sweeps_C", "sweeps_D", "sweeps_random",
            "time_C", "time_D", "time_random"]
    rows = [_am_row(spec, n, l1=True) for n in spec.dims]
    return cols, rows


def _clustering_cell(spec, samples, truth, method, seed):
    n = len(samples)
    start = time.perf_counter()
    if method == "vanilla":
        # plain K-means on the vectorized samples: single replicate, same
        # gap-based cluster-count selection as the tensor methods
        points = np.stack([s.data for s in samples])
        candidates = [k for k in spec.k_candidates if k < n]
        rng = np.random.default_rng(seed)
        k = select_k(points, candidates, rng.integers(0, 2**63 - 1), restarts=1)
        pred = kmeans(points, k, rng.integers(0, 2**63 - 1), restarts=1)
    else:
        config = StcConfig(
            rank_grid=spec.ranks,
            budget_grid=tuple(
                tuple(min(c, m) for m in samples[0].shape) + (n,) for c in spec.caps
            ),
            init_alg=method,
            am=AmConfig(tol=spec.tol, max_sweeps=spec.max_sweeps),
            k_candidates=spec.k_candidates,
            seed=seed,
        )
        pred, _, _ = stc_pipeline(samples, config)
    elapsed = time.perf_counter() - start
    return cluster_error(pred, truth), elapsed


def run_clustering_experiment(spec: ExperimentSpec):
    cols = ["n_samples", "sigma", "method", "cluster_err", "time"]
    rows = []
    for n in spec.sizes:
        for sigma in spec.noise:
            for method in spec.methods:
                err_sum = 0.0
                time_sum = 0.0
                for inst in range(spec.instances):
                    ss = _instance_seed(spec, n, int(round(sigma * 100)), inst)
                    samples, truth = gen_cluster_synthetic(n, sigma, spec.mu, ss)
                    cell_seed = int(
                        np.random.default_rng(ss.spawn(1)[0]).integers(0, 2**63 - 1)
                    )
                    err, elapsed = _clustering_cell(
                        spec, samples, truth, method, cell_seed
                    )
                    err_sum += err
                    time_sum += elapsed
                rows.append({
                    "n_samples": n,
                    "sigma": sigma,
                    "method": method,
                    "cluster_err": err_sum / spec.instances,
                    "time": time_sum / spec.instances,
                })
    return cols, rows


_RUNNERS = {
    "rank1-sweep": run_rank1_sweep,
    "sparsity-sweep": run_sparsity_sweep,
    "am-comparison": run_am_comparison,
    "l1-comparison": run_l1_comparison,
    "clustering": run_clustering_experiment,
}


def run_experiment(spec: ExperimentSpec):
    """Dispatch on spec.kind; returns (columns, rows)."""
    return _RUNNERS[spec.kind](spec)


def write_csv(spec: ExperimentSpec, columns, rows, path) -> None:
    """Write rows with a schema comment line; deterministic ordering."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# kind={spec.kind} version={CSV_VERSION} seed={spec.seed}\n")
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def run_spec_to_csv(spec: ExperimentSpec, out=None) -> Path:
    out = Path(out or spec.out or f"{spec.kind}.csv")
    columns, rows = run_experiment(spec)
    write_csv(spec, columns, rows, out)
    return out
