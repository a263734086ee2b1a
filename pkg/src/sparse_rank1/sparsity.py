"""Truncation and shrinkage operators: the sparsity engine.

``truncate`` keeps the ``r`` largest-magnitude entries of a vector, breaking
magnitude ties at the cut boundary in favor of smaller indices, which makes
every algorithm built on top of it deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadCardinality, ZeroInput

__all__ = [
    "TruncationResult",
    "truncate",
    "truncate_normalize",
    "soft_threshold_normalize",
    "top_r_indices",
]


@dataclass(frozen=True)
class TruncationResult:
    """Truncated copy of a vector plus the ascending indices that survived."""

    truncated: np.ndarray
    kept_indices: np.ndarray


def top_r_indices(a: np.ndarray, r: int) -> np.ndarray:
    """Indices of the ``r`` largest-magnitude entries, boundary ties to smaller index.

    Zero entries never count as kept, so fewer than ``r`` indices may return.
    """
    # Stable sort on descending magnitude leaves equal magnitudes in
    # ascending-index order, which is exactly the tie rule.
    order = np.argsort(-np.abs(a), kind="stable")[:r]
    kept = order[a[order] != 0.0]
    return np.sort(kept)


def truncate(a, r: int) -> TruncationResult:
    """Best r-sparse approximation of ``a`` in the Euclidean sense."""
    a = np.asarray(a, dtype=np.float64).ravel()
    if not 1 <= r <= a.size:
        raise BadCardinality(f"r={r} outside 1..{a.size}")
    kept = top_r_indices(a, r)
    truncated = np.zeros_like(a)
    truncated[kept] = a[kept]
    return TruncationResult(truncated, kept)


def truncate_normalize(a, r: int) -> np.ndarray:
    """Truncate to ``r`` entries and scale to unit Euclidean norm."""
    res = truncate(a, r)
    norm = np.linalg.norm(res.truncated)
    if norm == 0.0:
        raise ZeroInput("cannot normalize the truncation of a zero vector")
    return res.truncated / norm


def soft_threshold_normalize(g, rho: float):
    """Normalized soft thresholding; ``None`` when shrinkage kills every entry.

    Maximizes ``<g, x> - rho * ||x||_1`` over the unit ball.
    """
    g = np.asarray(g, dtype=np.float64).ravel()
    if rho < 0:
        raise BadCardinality(f"rho={rho} must be nonnegative")
    shrunk = np.sign(g) * np.maximum(np.abs(g) - rho, 0.0)
    norm = np.linalg.norm(shrunk)
    if norm == 0.0:
        return None
    return shrunk / norm
