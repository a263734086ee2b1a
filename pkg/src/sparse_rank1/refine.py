"""Alternating maximization refinement for the l0 and l1 models.

Both variants cycle over the modes and solve each block subproblem exactly:
truncation for the cardinality-constrained model, soft thresholding for the
l1-penalized one.  Stopping follows the factor-change rule
``max_j ||x_j_new - x_j_old|| <= tol`` with a sweep cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import InfeasibleInit, ZeroTensor
from .factors import Rank1Result, SparseFactorSet, SparsityBudget
from .sparsity import soft_threshold_normalize
from .tensor import DenseTensor, multilinear_grad, multilinear_value

__all__ = ["AmConfig", "AmTrace", "am_l0", "am_l1", "random_feasible"]


@dataclass(frozen=True)
class AmConfig:
    """Knobs for the AM loop; defaults match the benchmark settings."""

    tol: float = 1e-5
    max_sweeps: int = 2000
    model: str = "l0"
    rho: tuple[float, ...] | float = 0.2

    def __post_init__(self):
        if self.tol <= 0:
            raise InfeasibleInit("tol must be positive")
        if self.max_sweeps < 1:
            raise InfeasibleInit("max_sweeps must be >= 1")
        if self.model not in ("l0", "l1"):
            raise InfeasibleInit(f"unknown model {self.model!r}")

    def rho_for(self, d: int) -> tuple[float, ...]:
        rho = self.rho
        if np.isscalar(rho):
            rho = (float(rho),) * d
        else:
            rho = tuple(float(v) for v in rho)
            if len(rho) != d:
                raise InfeasibleInit(f"need {d} rho values, got {len(rho)}")
        if any(v < 0 for v in rho):
            raise InfeasibleInit("rho values must be nonnegative")
        return rho


@dataclass(frozen=True)
class AmTrace:
    """Objective history of one AM run."""

    objective_per_sweep: np.ndarray
    sweeps_used: int
    converged: bool


def _require_nonzero(t: DenseTensor) -> None:
    if not np.any(t.data):
        raise ZeroTensor("input tensor is zero")


def am_l0(
    t: DenseTensor,
    budget: SparsityBudget,
    init: SparseFactorSet,
    cfg: AmConfig = AmConfig(),
) -> tuple[Rank1Result, AmTrace]:
    """Refine ``init`` under the cardinality model; monotone in the objective."""
    _require_nonzero(t)
    budget.validate_for(t.shape)
    init.check_feasible(t, budget)
    factors, objectives, sweeps, converged = _backend.am_l0_loop(
        t.data, t.shape, tuple(budget), list(init), cfg.tol, cfg.max_sweeps
    )
    fs = SparseFactorSet(factors)
    value = float(objectives[-1])
    result = Rank1Result(fs, value, value, "am-l0", {"backend": _backend.BACKEND})
    return result, AmTrace(objectives, sweeps, converged)


def am_l1(
    t: DenseTensor,
    init: SparseFactorSet,
    cfg: AmConfig,
) -> tuple[list[np.ndarray], float, AmTrace]:
    """Refine under the l1-penalized model.

    Returns the final factors (norm <= 1, possibly zero-padded), the penalized
    objective ``<t, x_0 o ... o x_{d-1}> - sum_j rho_j ||x_j||_1``, and the
    trace.  A block whose shrinkage vanishes keeps its previous iterate, which
    leaves the objective unchanged for that block.
    """
    _require_nonzero(t)
    d = t.ndim
    rho = cfg.rho_for(d)
    factors = [np.array(f, dtype=np.float64) for f in init]
    for j, f in enumerate(factors):
        if f.size != t.shape[j]:
            raise InfeasibleInit(f"factor {j} has length {f.size}, expected {t.shape[j]}")
        if np.linalg.norm(f) > 1.0 + 1e-12:
            raise InfeasibleInit(f"factor {j} has norm > 1")

    def penalized() -> float:
        val = multilinear_value(t, factors)
        return val - sum(r * float(np.abs(f).sum()) for r, f in zip(rho, factors))

    objectives = []
    converged = False
    sweeps = 0
    for _ in range(cfg.max_sweeps):
        sweeps += 1
        old = [f.copy() for f in factors]
        for j in range(d):
            g = multilinear_grad(t, factors, j)
            updated = soft_threshold_normalize(g, rho[j])
            if updated is not None:
                factors[j] = updated
        objectives.append(penalized())
        delta = max(float(np.linalg.norm(factors[j] - old[j])) for j in range(d))
        if delta <= cfg.tol:
            converged = True
            break
    trace = AmTrace(np.asarray(objectives), sweeps, converged)
    return factors, float(objectives[-1]), trace


def random_feasible(shape, budget: SparsityBudget, seed) -> SparseFactorSet:
    """Random unit factors with uniformly chosen supports of size ``r_j``."""
    budget.validate_for(tuple(shape))
    rng = np.random.default_rng(seed)
    factors = []
    for n, r in zip(shape, budget):
        support = rng.choice(n, size=r, replace=False)
        x = np.zeros(n)
        vals = rng.standard_normal(r)
        while not np.any(vals):
            vals = rng.standard_normal(r)
        x[support] = vals
        factors.append(x / np.linalg.norm(x))
    return SparseFactorSet(factors)
