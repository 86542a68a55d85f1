"""Selects the grid-maximum kernel at import: the compiled extension when it
is importable and ``PLQCONJ_PURE`` is unset, else the numpy version."""
import os

from . import _oracle_py

BACKEND = "numpy"
grid_max = _oracle_py.grid_max

if not os.environ.get("PLQCONJ_PURE"):
    try:
        from ._oracle_kernel import grid_max  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        pass

__all__ = ["grid_max", "BACKEND"]
