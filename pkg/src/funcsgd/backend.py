"""Kernel backend selection.

The compiled extension is used when it imports; ``FUNCSGD_BACKEND=python``
forces the numpy fallback and ``FUNCSGD_BACKEND=cython`` makes a missing
extension an import error.
"""
import os

from . import _pycore

_choice = os.environ.get("FUNCSGD_BACKEND", "").strip().lower()

try:
    if _choice == "python":
        raise ImportError("python backend requested")
    from . import _core
except ImportError:
    if _choice == "cython":
        raise
    _core = None

default = _core if _core is not None else _pycore
NAME = default.NAME


def available() -> list[str]:
    return ["cython", "python"] if _core is not None else ["python"]


def get(name=None):
    """Backend module by name (``None`` gives the import-time default)."""
    if name is None:
        return default
    if not isinstance(name, str):
        return name
    if name == "python":
        return _pycore
    if name == "cython":
        if _core is None:
            raise ImportError("compiled backend is not built")
        return _core
    raise ValueError(f"unknown backend {name!r}")
