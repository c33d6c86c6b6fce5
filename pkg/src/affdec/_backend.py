"""Kernel backend selection.

Imports the compiled extension when available; falls back to the numpy
implementations otherwise.  ``AFFDEC_PURE_PYTHON=1`` forces the fallback,
which the benchmark and agreement tests use to compare both paths.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("AFFDEC_PURE_PYTHON", "") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND_NAME: str = _impl.BACKEND_NAME

eval2_many = _impl.eval2_many
enclose01 = _impl.enclose01
dft3_points = _impl.dft3_points
dft3_grid_direct = _impl.dft3_grid_direct


def fallback():
    """The pure-python module, regardless of the selected backend."""
    return _kernels_py
