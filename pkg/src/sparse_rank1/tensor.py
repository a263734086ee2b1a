"""Dense d-way tensors with a fixed column-major layout.

A :class:`DenseTensor` is an immutable flat ``float64`` array plus a shape.
The flat order is column-major (first index varies fastest), which pins down
every reshape/unfolding in the package to a single layout rule.  Modes are
0-based throughout the Python API.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    ModeOutOfRange,
    ShapeMismatch,
)

__all__ = [
    "DenseTensor",
    "reshape",
    "mode_unfold",
    "fiber",
    "multilinear_value",
    "multilinear_grad",
    "partial_hessian",
    "rank1_outer",
    "frobenius_norm",
    "inner",
]


class DenseTensor:
    """Immutable dense tensor stored as a flat column-major array.

    Parameters
    ----------
    data : array_like
        Flat values, length ``prod(shape)``, in column-major order.
    shape : sequence of int
        Mode sizes ``(n_0, ..., n_{d-1})``, all positive.
    """

    __slots__ = ("data", "shape")

    def __init__(self, data, shape):
        shape = tuple(int(n) for n in shape)
        if len(shape) < 1 or any(n < 1 for n in shape):
            raise ShapeMismatch(f"invalid shape {shape}")
        flat = np.ascontiguousarray(data, dtype=np.float64).ravel()
        if flat.size != math.prod(shape):
            raise ShapeMismatch(
                f"data has {flat.size} entries, shape {shape} needs {math.prod(shape)}"
            )
        flat = flat.copy()
        flat.flags.writeable = False
        object.__setattr__(self, "data", flat)
        object.__setattr__(self, "shape", shape)

    def __setattr__(self, name, value):
        raise AttributeError("DenseTensor is immutable")

    @classmethod
    def from_array(cls, arr) -> "DenseTensor":
        """Build from a d-dim ndarray (any memory order)."""
        arr = np.asarray(arr, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        return cls(arr.ravel(order="F"), arr.shape)

    def to_array(self) -> np.ndarray:
        """Read-only d-dim ndarray view of the tensor."""
        return self.data.reshape(self.shape, order="F")

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return self.data.size

    def __eq__(self, other):
        return (
            isinstance(other, DenseTensor)
            and self.shape == other.shape
            and np.array_equal(self.data, other.data)
        )

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))

    def __repr__(self):
        return f"DenseTensor(shape={self.shape})"


def reshape(t: DenseTensor, new_shape: Sequence[int]) -> DenseTensor:
    """Reinterpret the flat data under a new shape (column-major semantics)."""
    new_shape = tuple(int(n) for n in new_shape)
    if math.prod(new_shape) != t.size:
        raise ShapeMismatch(f"cannot reshape {t.shape} to {new_shape}")
    return DenseTensor(t.data, new_shape)


def _check_mode(t: DenseTensor, j: int) -> None:
    if not 0 <= j < t.ndim:
        raise ModeOutOfRange(f"mode {j} out of range for order-{t.ndim} tensor")


def mode_unfold(t: DenseTensor, j: int) -> DenseTensor:
    """Mode-j unfolding: an ``n_j x prod(rest)`` matrix.

    Row ``i`` collects every entry whose mode-j index equals ``i``; the
    remaining modes are ordered ascending and flattened column-major, so
    ``mode_unfold(t, 0)`` shares the flat data of ``t`` exactly.
    """
    _check_mode(t, j)
    arr = np.moveaxis(t.to_array(), j, 0)
    n_j = t.shape[j]
    return DenseTensor(arr.reshape((n_j, -1), order="F").ravel(order="F"), (n_j, t.size // n_j))


def fiber(t: DenseTensor, fixed: Sequence[int]) -> np.ndarray:
    """Mode-(d-1) fiber at the given indices of modes ``0..d-2``."""
    fixed = tuple(int(i) for i in fixed)
    if len(fixed) != t.ndim - 1:
        raise IndexOutOfRange(
            f"need {t.ndim - 1} fixed indices for an order-{t.ndim} tensor, got {len(fixed)}"
        )
    for k, i in enumerate(fixed):
        if not 0 <= i < t.shape[k]:
            raise IndexOutOfRange(f"index {i} out of range for mode {k} (size {t.shape[k]})")
    return np.array(t.to_array()[fixed], dtype=np.float64)


def _check_vectors(t: DenseTensor, xs, skip: int = -1) -> list[np.ndarray]:
    if len(xs) != t.ndim:
        raise DimensionMismatch(f"expected {t.ndim} vectors, got {len(xs)}")
    out = []
    for k, x in enumerate(xs):
        if k == skip:
            out.append(None)
            continue
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size != t.shape[k]:
            raise DimensionMismatch(
                f"vector for mode {k} has length {x.size}, expected {t.shape[k]}"
            )
        out.append(x)
    return out


def _back_contract(flat: np.ndarray, n: int, x: np.ndarray) -> np.ndarray:
    # flat viewed column-major as (len/n, n); contracts the trailing mode.
    return flat.reshape((-1, n), order="F") @ x


def _front_contract(flat: np.ndarray, n: int, x: np.ndarray) -> np.ndarray:
    # flat viewed column-major as (n, len/n); contracts the leading mode.
    return x @ flat.reshape((n, -1), order="F")


def multilinear_value(t: DenseTensor, xs: Sequence[np.ndarray]) -> float:
    """Full contraction ``<t, x_0 o ... o x_{d-1}>``."""
    vs = _check_vectors(t, xs)
    flat = t.data
    for k in range(t.ndim - 1, -1, -1):
        flat = _back_contract(flat, t.shape[k], vs[k])
    return float(flat[0])


def multilinear_grad(t: DenseTensor, xs: Sequence[np.ndarray], j: int) -> np.ndarray:
    """Partial gradient of the multilinear form with respect to mode ``j``.

    Slot ``j`` of ``xs`` is ignored; the result has length ``n_j`` and
    satisfies ``grad . xs[j] == multilinear_value(t, xs)``.
    """
    _check_mode(t, j)
    vs = _check_vectors(t, xs, skip=j)
    flat = t.data
    for k in range(t.ndim - 1, j, -1):
        flat = _back_contract(flat, t.shape[k], vs[k])
    for k in range(j):
        flat = _front_contract(flat, t.shape[k], vs[k])
    return np.asarray(flat, dtype=np.float64)


def partial_hessian(t: DenseTensor, xs: Sequence[np.ndarray]) -> DenseTensor:
    """Contract modes ``0..d-3`` with ``xs``; returns the ``n_{d-2} x n_{d-1}`` matrix."""
    d = t.ndim
    if d < 3:
        raise ModeOutOfRange("partial_hessian needs an order-3 or higher tensor")
    if len(xs) != d - 2:
        raise DimensionMismatch(f"expected {d - 2} vectors, got {len(xs)}")
    flat = t.data
    for k in range(d - 2):
        x = np.asarray(xs[k], dtype=np.float64).ravel()
        if x.size != t.shape[k]:
            raise DimensionMismatch(
                f"vector for mode {k} has length {x.size}, expected {t.shape[k]}"
            )
        flat = _front_contract(flat, t.shape[k], x)
    return DenseTensor(flat, (t.shape[d - 2], t.shape[d - 1]))


def rank1_outer(xs: Sequence[np.ndarray], weight: float) -> DenseTensor:
    """Rank-1 tensor ``weight * x_0 o ... o x_{d-1}``."""
    arr = np.asarray(xs[0], dtype=np.float64).ravel() * float(weight)
    for x in xs[1:]:
        arr = np.multiply.outer(arr, np.asarray(x, dtype=np.float64).ravel())
    return DenseTensor.from_array(arr)


def frobenius_norm(t: DenseTensor) -> float:
    return float(np.linalg.norm(t.data))


def inner(t: DenseTensor, s: DenseTensor) -> float:
    if t.shape != s.shape:
        raise DimensionMismatch(f"shapes {t.shape} and {s.shape} differ")
    return float(t.data @ s.data)
