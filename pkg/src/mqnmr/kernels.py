"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the NumPy
fallback is imported.  Setting ``MQNMR_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("MQNMR_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

phase_rotate = _impl.phase_rotate
coherence_sums = _impl.coherence_sums

__all__ = ["BACKEND", "phase_rotate", "coherence_sums"]
