"""Backend selection for the hot loops.

The compiled extension is used when it was built and importable; set
``DCSK_RELAY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

_force_py = os.environ.get("DCSK_RELAY_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

chebyshev_fill = _impl.chebyshev_fill
correlate_halves = _impl.correlate_halves

__all__ = ["BACKEND", "chebyshev_fill", "correlate_halves"]
