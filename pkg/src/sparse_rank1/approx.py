"""The four approximation algorithms for sparse best rank-1 approximation.

All four return feasible factors with a strictly positive objective on any
nonzero input, and each carries a provable worst-case lower bound:

* ``algorithm_a`` scans every last-mode fiber for the one whose truncation is
  longest, then sweeps the remaining modes back to front.
* ``algorithm_b`` replaces the fiber scan with the best leading singular value
  over the slice matrices of the first ``d-2`` modes.
* ``algorithm_c`` cascades truncated leading singular vectors of successive
  unfoldings.
* ``algorithm_d`` runs the same cascade but replaces each singular solve with
  a multiply against the largest-norm row, making it the cheapest of the four.

``brute_force_oracle`` enumerates supports on tiny instances to lower-bound
the optimal value for the bound tests.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import _backend
from .errors import InputError, ModeOutOfRange, TooLarge, ZeroTensor
from .factors import Rank1Result, SparseFactorSet, SparsityBudget
from .linalg import lambda_max, leading_singular_triple
from .sparsity import truncate_normalize
from .tensor import DenseTensor, mode_unfold, multilinear_value

__all__ = [
    "objective",
    "algorithm_a",
    "algorithm_b",
    "algorithm_c",
    "algorithm_d",
    "upper_bound",
    "brute_force_oracle",
    "run_algorithm",
    "theoretical_bound",
]

ORACLE_GUARD = 10**6
_ORACLE_SEED = 0x0AC1E


def objective(t: DenseTensor, factors: SparseFactorSet) -> float:
    """Objective value ``<t, x_0 o ... o x_{d-1}>`` (also the optimal weight)."""
    return multilinear_value(t, list(factors))


def _prepare(t: DenseTensor, budget: SparsityBudget) -> None:
    if t.ndim < 3:
        raise ModeOutOfRange(f"approximation algorithms need order >= 3, got {t.ndim}")
    if not np.any(t.data):
        raise ZeroTensor("input tensor is zero")
    budget.validate_for(t.shape)


def _finalize(t, factors, algorithm, diagnostics) -> Rank1Result:
    value = multilinear_value(t, factors)
    if value < 0.0:
        # cannot happen on the algorithms' own paths; lambda absorbs the sign
        factors = [-factors[0]] + list(factors[1:])
        value = -value
    return Rank1Result(SparseFactorSet(factors), value, value, algorithm, diagnostics)


def _basis_sweep(arr: np.ndarray, budget, bar_idx, factors, start_mode: int):
    """Shared step 3 of algorithms A and B.

    Updates modes ``start_mode..0``: the gradient holds basis vectors at the
    winning indices for modes below ``j`` and the already-computed factors
    above ``j``.
    """
    d = arr.ndim
    for j in range(start_mode, -1, -1):
        sub = arr[bar_idx[:j]]  # modes j..d-1 remain
        g = sub
        for k in range(d - 1, j, -1):
            g = g.reshape((-1, arr.shape[k]), order="F") @ factors[k]
        if not np.any(g):
            raise ZeroTensor("zero gradient during sweep (zero tensor slice)")
        factors[j] = truncate_normalize(g, budget[j])


def algorithm_a(t: DenseTensor, budget: SparsityBudget) -> Rank1Result:
    """Fiber-scan approximation; bound ``v_opt / sqrt(prod of the d-1 smallest caps)``.

    Modes are internally ordered so the caps ascend (stable on ties), matching
    the assumption the bound is stated under; factors are mapped back before
    returning.
    """
    _prepare(t, budget)
    perm = tuple(np.argsort(np.asarray(tuple(budget)), kind="stable"))
    arr = np.asarray(t.to_array().transpose(perm), order="F")
    r = tuple(budget[p] for p in perm)
    d = arr.ndim
    n_last = arr.shape[-1]

    # norm of each fiber after truncation to the last-mode cap; ties on the
    # winning fiber go to the lexicographically smallest index tuple
    fibers = arr.reshape((-1, n_last), order="F")
    mags = np.abs(fibers)
    if r[-1] < n_last:
        kept = np.partition(mags, n_last - r[-1], axis=1)[:, n_last - r[-1] :]
    else:
        kept = mags
    norms2 = np.einsum("ij,ij->i", kept, kept)
    grid = norms2.reshape(arr.shape[:-1], order="F")
    bar_idx = tuple(int(i) for i in np.argwhere(grid == grid.max())[0])

    factors = [np.zeros(n) for n in arr.shape]
    factors[d - 1] = truncate_normalize(arr[bar_idx], r[-1])
    _basis_sweep(arr, r, bar_idx, factors, d - 2)

    inv = np.argsort(perm)
    out = [factors[inv[k]] for k in range(d)]
    diag = {"mode_order": perm, "selected_fiber": bar_idx}
    return _finalize(t, out, "A", diag)


def algorithm_b(t: DenseTensor, budget: SparsityBudget) -> Rank1Result:
    """Slice-SVD approximation; strongest when the last two modes dominate."""
    _prepare(t, budget)
    arr = t.to_array()
    d = t.ndim
    best = None
    for idx in itertools.product(*(range(n) for n in t.shape[: d - 2])):
        slab = np.ascontiguousarray(arr[idx])
        if not np.any(slab):
            continue
        triple = leading_singular_triple(slab)
        if best is None or triple.sigma > best[1].sigma:
            best = (idx, triple)
    if best is None:
        raise ZeroTensor("input tensor is zero")
    bar_idx, triple = best

    factors = [np.zeros(n) for n in t.shape]
    factors[d - 1] = truncate_normalize(triple.right, budget[d - 1])
    _basis_sweep(arr, tuple(budget), bar_idx, factors, d - 2)
    diag = {
        "selected_slice": bar_idx,
        "slice_sigma": triple.sigma,
        "converged": triple.converged,
    }
    return _finalize(t, factors, "B", diag)


def _cascade(t: DenseTensor, budget: SparsityBudget, pick_direction) -> tuple[list, dict]:
    """Shared unfolding cascade of algorithms C and D.

    ``pick_direction(A_j)`` supplies the pre-truncation vector for mode j from
    the current unfolding; the final mode multiplies through directly.
    """
    d = t.ndim
    factors = []
    diag_flags = []
    flat = t.data
    for j in range(d - 1):
        A = flat.reshape((t.shape[j], -1), order="F")
        if not np.any(A):
            raise ZeroTensor("zero unfolding in cascade")
        xbar, flag = pick_direction(A)
        factors.append(truncate_normalize(xbar, budget[j]))
        diag_flags.append(flag)
        flat = factors[j] @ A
    if not np.any(flat):
        raise ZeroTensor("zero contraction before the last mode")
    factors.append(truncate_normalize(flat, budget[d - 1]))
    return factors, {"cascade_flags": tuple(diag_flags)}


def algorithm_c(t: DenseTensor, budget: SparsityBudget) -> Rank1Result:
    """Cascaded truncated singular vectors of the successive unfoldings."""
    _prepare(t, budget)

    def pick(A):
        triple = leading_singular_triple(A)
        return triple.left, triple.converged

    factors, diag = _cascade(t, budget, pick)
    return _finalize(t, factors, "C", diag)


def algorithm_d(t: DenseTensor, budget: SparsityBudget) -> Rank1Result:
    """SVD-free cascade: multiply each unfolding by its largest-norm row."""
    _prepare(t, budget)

    def pick(A):
        norms = np.einsum("ij,ij->i", A, A)
        row = A[int(np.argmax(norms))]
        return A @ (row / np.linalg.norm(row)), True

    factors, diag = _cascade(t, budget, pick)
    return _finalize(t, factors, "D", diag)


_ALGORITHMS = {
    "A": algorithm_a,
    "B": algorithm_b,
    "C": algorithm_c,
    "D": algorithm_d,
}


def run_algorithm(name: str, t: DenseTensor, budget: SparsityBudget) -> Rank1Result:
    """Dispatch by name: A, B, C, or D."""
    try:
        fn = _ALGORITHMS[name.upper()]
    except KeyError:
        raise InputError(f"unknown algorithm {name!r}") from None
    return fn(t, budget)


def upper_bound(t: DenseTensor) -> float:
    """Smallest leading singular value over all mode unfoldings."""
    if not np.any(t.data):
        return 0.0
    return min(lambda_max(mode_unfold(t, j).to_array()) for j in range(t.ndim))


def brute_force_oracle(
    t: DenseTensor, budget: SparsityBudget, restarts: int = 20
) -> Rank1Result:
    """Support enumeration + dense AM: a lower-bound oracle for the optimum.

    Exact for all-ones budgets (reduces to the largest-magnitude entry);
    otherwise the returned value is a feasible lower bound that tightens with
    ``restarts``.
    """
    _prepare(t, budget)
    combos = math.prod(math.comb(n, r) for n, r in zip(t.shape, budget))
    if combos > ORACLE_GUARD:
        raise TooLarge(f"{combos} support combinations exceed the {ORACLE_GUARD} guard")

    arr = t.to_array()
    sub_shape = tuple(budget)
    best_value = -1.0
    best_factors = None
    rng = np.random.default_rng(_ORACLE_SEED)

    for supports in itertools.product(
        *(itertools.combinations(range(n), r) for n, r in zip(t.shape, budget))
    ):
        sub = np.asarray(arr[np.ix_(*supports)], order="F")
        if not np.any(sub):
            continue
        subflat = sub.ravel(order="F")
        c_init = algorithm_c(DenseTensor(subflat, sub_shape), SparsityBudget(sub_shape))
        inits = [list(c_init.factors)]
        for _ in range(restarts):
            inits.append([_unit_random(rng, n) for n in sub_shape])
        for init in inits:
            factors, objectives, _, _ = _backend.am_l0_loop(
                subflat, sub_shape, sub_shape, init, 1e-5, 2000
            )
            value = float(objectives[-1])
            if value > best_value:
                best_factors = [
                    _embed(fac, sup, n)
                    for fac, sup, n in zip(factors, supports, t.shape)
                ]
                best_value = value

    if best_factors is None:
        raise ZeroTensor("input tensor is zero")
    diag = {"support_combinations": combos, "restarts": restarts}
    return _finalize(t, best_factors, "oracle", diag)


def _unit_random(rng, n: int) -> np.ndarray:
    x = rng.standard_normal(n)
    while not np.any(x):
        x = rng.standard_normal(n)
    return x / np.linalg.norm(x)


def _embed(vec: np.ndarray, support, n: int) -> np.ndarray:
    out = np.zeros(n)
    out[list(support)] = vec
    return out


def theoretical_bound(name: str, t: DenseTensor, budget: SparsityBudget) -> float:
    """Right-hand side of the worst-case bound, without the optimal value.

    For C and D the bound is fully computable (it references lambda_max of the
    first unfolding and the Frobenius norm); for A and B the returned factor
    multiplies ``v_opt``.
    """
    n = t.shape
    r = tuple(budget)
    d = t.ndim
    name = name.upper()
    if name == "A":
        r_sorted = sorted(r)
        return 1.0 / math.sqrt(math.prod(r_sorted[: d - 1]))
    if name == "B":
        return math.sqrt(
            r[d - 2] * r[d - 1] / (n[d - 2] * n[d - 1] * math.prod(r[: d - 2]))
        )
    ratio = math.sqrt(math.prod(r) / math.prod(n))
    if name == "C":
        lam = lambda_max(t.data.reshape((n[0], -1), order="F"))
        return ratio * lam / math.sqrt(math.prod(n[1 : d - 1]))
    if name == "D":
        fro = float(np.linalg.norm(t.data))
        return ratio * fro / math.sqrt(math.prod(n[: d - 1]))
    raise InputError(f"unknown algorithm {name!r}")
