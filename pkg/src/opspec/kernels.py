"""Kernel selection: compiled extension when importable, else pure Python.

Set ``OPSPEC_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("OPSPEC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

zi_matmul = _impl.zi_matmul
zi_rank = _impl.zi_rank

__all__ = ["BACKEND", "zi_matmul", "zi_rank"]
