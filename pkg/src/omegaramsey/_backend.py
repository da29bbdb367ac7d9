"""Kernel backend selection.

The compiled ``_core`` extension is used when it imports; otherwise the
pure-Python ``_pycore`` module. Setting ``OMEGARAMSEY_PURE_PYTHON=1`` forces
the fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pycore


def load(name: str | None = None) -> ModuleType:
    """Return the kernel module called ``name`` ("cython" or "python")."""
    if name == "python":
        return _pycore
    if name == "cython":
        from . import _core
        return _core
    if name is not None:
        raise ValueError(f"unknown backend {name!r}")
    if os.environ.get("OMEGARAMSEY_PURE_PYTHON", "") not in ("", "0"):
        return _pycore
    try:
        from . import _core
    except ImportError:
        return _pycore
    return _core


kernels = load()
BACKEND = kernels.BACKEND


def available() -> list[str]:
    names = ["python"]
    try:
        from . import _core  # noqa: F401
    except ImportError:
        return names
    return ["cython", "python"]
