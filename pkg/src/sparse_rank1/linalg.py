"""Leading singular value machinery via deterministic power iteration.

Kept dependency-free on purpose: the start vector is the largest-norm row of
the matrix, so repeated runs are bit-reproducible, and the accuracy knobs
(``tol=1e-10``, ``max_iter=5000``) are generous for the matrix sizes the
algorithms produce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ZeroMatrix

__all__ = ["SingularTriple", "leading_singular_triple", "lambda_max"]

_RESTART_SEED = 0x5EED  # single fallback start if the deterministic one breaks down


@dataclass(frozen=True)
class SingularTriple:
    """Leading singular value with its unit singular vector pair."""

    sigma: float
    left: np.ndarray
    right: np.ndarray
    converged: bool
    iterations: int


def _largest_row(M: np.ndarray) -> np.ndarray:
    norms = np.einsum("ij,ij->i", M, M)
    return M[int(np.argmax(norms))]


def _iterate(M: np.ndarray, v0: np.ndarray, tol: float, max_iter: int):
    v = v0
    sigma_prev = -1.0
    for it in range(1, max_iter + 1):
        u = M @ v
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return None
        u /= nu
        w = M.T @ u
        sigma = np.linalg.norm(w)
        if sigma == 0.0:
            return None
        v = w / sigma
        if abs(sigma - sigma_prev) <= tol:
            return v, it, True
        sigma_prev = sigma
    return v, max_iter, False


def leading_singular_triple(M, tol: float = 1e-10, max_iter: int = 5000) -> SingularTriple:
    """Leading singular triple of ``M`` by alternating power iteration.

    Starts from the normalized largest-norm row (transposed), so the result
    is deterministic.  Non-convergence within ``max_iter`` is reported via
    the ``converged`` flag, not an exception.  Sign convention: ``sigma >= 0``
    and the first nonzero entry of ``left`` is positive.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ZeroMatrix(f"expected a matrix, got ndim={M.ndim}")
    if not np.any(M):
        raise ZeroMatrix("zero matrix has no singular vector pair")

    # iterate on the Frobenius-normalized matrix: the trajectory and the stop
    # decisions become scale-invariant, so lambda_max(c*M) = |c|*lambda_max(M)
    # holds to rounding
    scale = float(np.linalg.norm(M))
    Mn = M / scale
    row = _largest_row(Mn)
    out = _iterate(Mn, row / np.linalg.norm(row), tol, max_iter)
    if out is None:
        # The row-space start provably cannot break down for a nonzero M;
        # this is a defensive seeded retry.
        rng = np.random.default_rng(_RESTART_SEED)
        v0 = rng.standard_normal(M.shape[1])
        out = _iterate(Mn, v0 / np.linalg.norm(v0), tol, max_iter)
        if out is None:
            raise ZeroMatrix("power iteration broke down twice")
    v, iterations, converged = out

    u = Mn @ v
    sigma_n = float(np.linalg.norm(u))
    u /= sigma_n
    nz = np.flatnonzero(u)
    if nz.size and u[nz[0]] < 0:
        u = -u
        v = -v
    return SingularTriple(scale * sigma_n, u, v, converged, iterations)


def lambda_max(M, tol: float = 1e-10, max_iter: int = 5000) -> float:
    """Largest singular value; 0 for the zero matrix."""
    M = np.asarray(M, dtype=np.float64)
    if M.size == 0 or not np.any(M):
        return 0.0
    return leading_singular_triple(M, tol=tol, max_iter=max_iter).sigma
