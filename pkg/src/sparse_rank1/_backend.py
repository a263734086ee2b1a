"""Selects the AM kernel implementation at import time.

``SPARSE_RANK1_BACKEND`` controls the choice: ``auto`` (default) prefers the
compiled extension and silently falls back to NumPy, ``c`` requires the
extension, ``python`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _am_fallback

__all__ = ["am_l0_loop", "BACKEND", "available_backends"]

_choice = os.environ.get("SPARSE_RANK1_BACKEND", "auto").lower()
if _choice not in ("auto", "c", "python"):
    raise ImportError(f"SPARSE_RANK1_BACKEND must be auto, c, or python, not {_choice!r}")

am_l0_loop = _am_fallback.am_l0_loop
BACKEND = "python"

if _choice in ("auto", "c"):
    try:
        from . import _am_kernel

        am_l0_loop = _am_kernel.am_l0_loop
        BACKEND = "c"
    except ImportError:
        if _choice == "c":
            raise


def available_backends() -> dict:
    """Map of backend name to its ``am_l0_loop`` callable (built ones only)."""
    out = {"python": _am_fallback.am_l0_loop}
    try:
        from . import _am_kernel

        out["c"] = _am_kernel.am_l0_loop
    except ImportError:
        pass
    return out
