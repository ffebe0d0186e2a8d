"""Kernel backend selection: compiled extension if available, numpy otherwise."""

try:
    from . import llf_cython as _backend

    BACKEND = "cython"
except ImportError:  # extension not built on this machine
    from . import llf_numpy as _backend

    BACKEND = "numpy"

evolve = _backend.evolve

__all__ = ["evolve", "BACKEND"]
