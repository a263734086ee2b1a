"""Seeded synthetic data generators for the experiments.

``gen_sparse_cp`` draws a sum of R outer products of sparse Gaussian vectors;
``gen_cluster_synthetic`` builds the four-group block-pattern samples and
adds noise at the stacked-tensor level.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BadN, InputError
from .cluster import ClusterAssignment
from .tensor import DenseTensor, rank1_outer

__all__ = [
    "gen_sparse_cp",
    "gen_cluster_synthetic",
    "cluster_pattern_samples",
]


def gen_sparse_cp(shape, rank: int = 10, sparsity_ratio: float = 0.7, seed=0) -> DenseTensor:
    """Sum of ``rank`` outer products of Gaussian vectors with zeroed entries.

    Each factor vector is standard normal and then ``floor(sr * n_j)`` of its
    entries are zeroed uniformly at random; deterministic per seed.
    """
    if not 0.0 <= sparsity_ratio < 1.0:
        raise InputError(f"sparsity_ratio={sparsity_ratio} outside [0, 1)")
    shape = tuple(int(n) for n in shape)
    rng = np.random.default_rng(seed)
    acc = np.zeros(math.prod(shape))
    for _ in range(rank):
        vecs = []
        for n in shape:
            v = rng.standard_normal(n)
            n_zero = int(sparsity_ratio * n)
            if n_zero:
                v[rng.choice(n, size=n_zero, replace=False)] = 0.0
            vecs.append(v)
        acc = acc + rank1_outer(vecs, 1.0).data
    return DenseTensor(acc, shape)


def cluster_pattern_samples(n_samples: int, mu: float = 0.5) -> list[np.ndarray]:
    """Noiseless 20x20 block-pattern samples, four equal groups in order.

    Group g places ``s1 * Sigma`` and ``s2 * Sigma`` on the first two diagonal
    4x4 blocks with the sign pattern (+,-), (+,+), (-,+), (-,-), scaled mu^3.
    """
    if n_samples < 4 or n_samples % 4:
        raise BadN(f"sample count must be a positive multiple of 4, got {n_samples}")
    v = np.array([1.0, -1.0, 0.5, -0.5])
    sigma = np.outer(v, v)
    signs = [(1, -1), (1, 1), (-1, 1), (-1, -1)]
    samples = []
    for s1, s2 in signs:
        a = np.zeros((20, 20))
        a[0:4, 0:4] = s1 * sigma
        a[4:8, 4:8] = s2 * sigma
        samples.extend([mu**3 * a] * (n_samples // 4))
    return samples


def gen_cluster_synthetic(n_samples: int, sigma: float, mu: float = 0.5, seed=0):
    """Noisy clustering samples plus their true assignment.

    The clean samples are stacked, the stack is scaled to unit Frobenius norm,
    and unit-norm Gaussian noise scaled by ``sigma`` is added; the returned
    samples are the slices of that noisy stack.
    """
    patterns = cluster_pattern_samples(n_samples, mu)
    stacked = np.stack(patterns, axis=-1)
    stacked = stacked / np.linalg.norm(stacked)
    if sigma != 0.0:
        rng = np.random.default_rng(seed)
        noise = rng.standard_normal(stacked.shape)
        stacked = stacked + sigma * noise / np.linalg.norm(noise)
    samples = [DenseTensor.from_array(stacked[..., i]) for i in range(n_samples)]
    group = n_samples // 4
    labels = tuple(1 + i // group for i in range(n_samples))
    return samples, ClusterAssignment(labels, 4)
