"""Backend selection for the displacement kernels.

The compiled extension is used when it imports; setting
``CUSP_CERTIFY_PURE=1`` forces the pure-Python fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CUSP_CERTIFY_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

displacement = _impl.displacement
descend = _impl.descend

__all__ = ["BACKEND", "displacement", "descend"]
