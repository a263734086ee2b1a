"""Text serialization for dense tensors (``.sten`` files).

Format: line 1 holds the order ``d``, line 2 the ``d`` mode sizes, and the
rest of the file holds exactly ``prod(shape)`` whitespace-separated values in
column-major order.  Values are written with 17 significant digits so a
write/read round trip is bit-exact for float64.
"""

from __future__ import annotations

import math
from pathlib import Path

from .errors import ShapeMismatch
from .tensor import DenseTensor

__all__ = ["read_sten", "write_sten"]


def read_sten(path) -> DenseTensor:
    """Parse a ``.sten`` file; rejects wrong counts and malformed headers."""
    tokens = Path(path).read_text().split()
    if not tokens:
        raise ShapeMismatch(f"{path}: empty file")
    try:
        d = int(tokens[0])
    except ValueError:
        raise ShapeMismatch(f"{path}: first token must be the tensor order") from None
    if d < 1 or len(tokens) < 1 + d:
        raise ShapeMismatch(f"{path}: truncated header")
    try:
        shape = tuple(int(tok) for tok in tokens[1 : 1 + d])
    except ValueError:
        raise ShapeMismatch(f"{path}: non-integer mode size") from None
    values = tokens[1 + d :]
    expected = math.prod(shape) if all(n >= 1 for n in shape) else -1
    if len(values) != expected:
        raise ShapeMismatch(
            f"{path}: expected {expected} values for shape {shape}, found {len(values)}"
        )
    try:
        data = [float(tok) for tok in values]
    except ValueError:
        raise ShapeMismatch(f"{path}: non-numeric value") from None
    return DenseTensor(data, shape)


def write_sten(t: DenseTensor, path) -> None:
    """Write a tensor as ``.sten`` text (17 significant digits per value)."""
    lines = [str(t.ndim), " ".join(str(n) for n in t.shape)]
    lines.extend(f"{v:.17g}" for v in t.data)
    Path(path).write_text("\n".join(lines) + "\n")
