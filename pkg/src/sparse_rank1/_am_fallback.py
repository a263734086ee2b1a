"""NumPy implementation of the l0 alternating-maximization sweep loop.

Mirrors the compiled kernel in ``_am_kernel.pyx`` exactly: same block order,
same truncation tie rule, same stopping test.  Used when the extension is not
built or when ``SPARSE_RANK1_BACKEND=python`` forces it.
"""

from __future__ import annotations

import numpy as np

__all__ = ["am_l0_loop"]


def _gradient(flat: np.ndarray, shape, factors, j: int) -> np.ndarray:
    d = len(shape)
    g = flat
    for k in range(d - 1, j, -1):
        g = g.reshape((-1, shape[k]), order="F") @ factors[k]
    for k in range(j):
        g = factors[k] @ g.reshape((shape[k], -1), order="F")
    return g


def _truncated_top_r(g: np.ndarray, r: int) -> np.ndarray:
    out = np.zeros_like(g)
    order = np.argsort(-np.abs(g), kind="stable")[:r]
    kept = order[g[order] != 0.0]
    out[kept] = g[kept]
    return out


def am_l0_loop(flat, shape, r, init, tol, max_sweeps):
    """Run l0 AM sweeps; returns (factors, objectives, sweeps_used, converged)."""
    flat = np.asarray(flat, dtype=np.float64)
    d = len(shape)
    factors = [np.array(f, dtype=np.float64) for f in init]
    objectives = []
    converged = False
    sweeps = 0
    for _ in range(max_sweeps):
        sweeps += 1
        old = [f.copy() for f in factors]
        obj = 0.0
        for j in range(d):
            g = _gradient(flat, shape, factors, j)
            tg = _truncated_top_r(g, r[j])
            norm = np.linalg.norm(tg)
            if norm > 0.0:
                factors[j] = tg / norm
            # zero gradient: keep the previous block iterate
            if j == d - 1:
                obj = float(g @ factors[j])
        objectives.append(obj)
        delta = max(float(np.linalg.norm(factors[j] - old[j])) for j in range(d))
        if delta <= tol:
            converged = True
            break
    return factors, np.asarray(objectives), sweeps, converged
