"""Kernel selection: the compiled extension when available, else the pure-Python fallback.

Set INDEX7_PURE_PYTHON=1 to force the fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

ChiKernel = _pykernels.ChiKernel
BACKEND = _pykernels.BACKEND

if not os.environ.get("INDEX7_PURE_PYTHON"):
    try:
        from . import _kernels
    except ImportError:  # extension not built
        _kernels = None
    else:
        ChiKernel = _kernels.ChiKernel
        BACKEND = _kernels.BACKEND

PythonChiKernel = _pykernels.ChiKernel


def compiled_kernel_class():
    """The compiled ChiKernel class, or None when the extension is unavailable."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels.ChiKernel
