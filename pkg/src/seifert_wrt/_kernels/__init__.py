"""Hot kernels, compiled when available.

The Cython build is used unless it failed to compile or the environment
variable ``SEIFERT_WRT_PURE_PYTHON`` is set to a non-empty value other than 0.
"""

import os

from . import _pykernel

_force_py = os.environ.get("SEIFERT_WRT_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_py:
        raise ImportError
    from ._ckernel import fiber_sums
    BACKEND = "cython"
except ImportError:
    fiber_sums = _pykernel.fiber_sums
    BACKEND = "python"

__all__ = ["fiber_sums", "BACKEND"]
