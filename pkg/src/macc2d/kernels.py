"""Backend selection for the hot search kernel.

The compiled extension is used when it was built and imports cleanly;
otherwise the pure-Python twin runs. Setting ``MACC2D_PURE_PYTHON=1`` before
import forces the fallback.
"""
import os

from . import _search_py

_ext = None
if not os.environ.get("MACC2D_PURE_PYTHON"):
    try:
        from . import _search_ext as _ext
    except ImportError:
        _ext = None

BACKEND = "cython" if _ext is not None else "python"


def available_backends():
    return ["cython", "python"] if _ext is not None else ["python"]


def _fits_compiled(f, k, s):
    return (f <= _ext.MAX_ROWS and k <= _ext.MAX_COLS and s <= _ext.MAX_INTS
            and f * k <= 4096)


def search_kernel(f, k, z, l, s, backend=None):
    """Run the EPDA backtracking kernel; returns ``(grid or None, nodes)``."""
    backend = backend or BACKEND
    if backend == "cython":
        if _ext is None:
            raise RuntimeError("compiled kernel not available")
        if _fits_compiled(f, k, s):
            return _ext.search(f, k, z, l, s)
        return _search_py.search(f, k, z, l, s)
    if backend == "python":
        return _search_py.search(f, k, z, l, s)
    raise ValueError(f"unknown backend {backend!r}")
