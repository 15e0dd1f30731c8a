"""Kernel backend selection.

The compiled extension is optional. By default we use it when present and
fall back to the numpy implementations otherwise. Set XRESPONSE_KERNELS to
"python" or "compiled" to force a backend (forcing "compiled" raises if the
extension is missing).
"""

from __future__ import annotations

import os

_requested = os.environ.get("XRESPONSE_KERNELS", "auto").lower()
if _requested not in {"auto", "python", "compiled"}:
    raise ImportError(
        f"XRESPONSE_KERNELS must be auto, python, or compiled, got {_requested!r}"
    )

HAS_COMPILED = False
if _requested in {"auto", "compiled"}:
    try:
        from . import _speedups  # noqa: F401

        HAS_COMPILED = True
    except ImportError:
        if _requested == "compiled":
            raise

if HAS_COMPILED:
    from ._speedups import (  # type: ignore[no-redef]
        lagged_product_sums,
        sign_product_sums,
        tick_rule_signs,
    )

    BACKEND = "compiled"
else:
    from ._fallback import (  # noqa: F401
        lagged_product_sums,
        sign_product_sums,
        tick_rule_signs,
    )

    BACKEND = "python"

__all__ = [
    "BACKEND",
    "HAS_COMPILED",
    "lagged_product_sums",
    "sign_product_sums",
    "tick_rule_signs",
]
