"""Candidate-solution containers shared by the approximation and refinement code."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadCardinality, DimensionMismatch, InfeasibleInit
from .tensor import DenseTensor

__all__ = ["SparsityBudget", "SparseFactorSet", "Rank1Result"]

UNIT_NORM_TOL = 1e-12


@dataclass(frozen=True)
class SparsityBudget:
    """Per-mode cardinality caps ``r_0..r_{d-1}``."""

    r: tuple[int, ...]

    def __init__(self, r):
        object.__setattr__(self, "r", tuple(int(v) for v in r))
        if any(v < 1 for v in self.r):
            raise BadCardinality(f"every cap must be >= 1, got {self.r}")

    def validate_for(self, shape: tuple[int, ...]) -> None:
        if len(self.r) != len(shape):
            raise DimensionMismatch(
                f"budget has {len(self.r)} modes, tensor has {len(shape)}"
            )
        for j, (rj, nj) in enumerate(zip(self.r, shape)):
            if rj > nj:
                raise BadCardinality(f"r_{j}={rj} exceeds mode size {nj}")

    def __len__(self):
        return len(self.r)

    def __iter__(self):
        return iter(self.r)

    def __getitem__(self, j):
        return self.r[j]


class SparseFactorSet:
    """One unit vector per mode, each respecting its cardinality cap."""

    __slots__ = ("factors",)

    def __init__(self, factors):
        fs = tuple(np.asarray(f, dtype=np.float64).ravel() for f in factors)
        object.__setattr__(self, "factors", fs)

    def __setattr__(self, name, value):
        raise AttributeError("SparseFactorSet is immutable")

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __getitem__(self, j):
        return self.factors[j]

    def check_feasible(self, t: DenseTensor, budget: SparsityBudget) -> None:
        """Raise :class:`InfeasibleInit` unless unit-norm and within budget."""
        if len(self.factors) != t.ndim or len(budget) != t.ndim:
            raise InfeasibleInit("factor/budget count does not match tensor order")
        for j, f in enumerate(self.factors):
            if f.size != t.shape[j]:
                raise InfeasibleInit(
                    f"factor {j} has length {f.size}, expected {t.shape[j]}"
                )
            if abs(np.linalg.norm(f) - 1.0) > UNIT_NORM_TOL:
                raise InfeasibleInit(f"factor {j} is not unit norm")
            if int(np.count_nonzero(f)) > budget[j]:
                raise InfeasibleInit(
                    f"factor {j} has {np.count_nonzero(f)} nonzeros, cap is {budget[j]}"
                )

    def support_sizes(self) -> tuple[int, ...]:
        return tuple(int(np.count_nonzero(f)) for f in self.factors)


@dataclass(frozen=True)
class Rank1Result:
    """Output of one rank-1 approximation: factors, objective value, weight."""

    factors: SparseFactorSet
    value: float
    weight_lambda: float
    algorithm: str
    diagnostics: dict = field(default_factory=dict)
