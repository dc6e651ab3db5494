"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; the NumPy
fallback is always available.  ``CROWDMAP_BACKEND=numpy|compiled`` forces
a choice at import time, and callers may request one explicitly per call.
"""

import os

from . import _kernels_py
from .errors import InvalidArgumentError

try:
    from . import _kernels_c
except ImportError:
    _kernels_c = None

_BACKENDS = {"numpy": _kernels_py}
if _kernels_c is not None:
    _BACKENDS["compiled"] = _kernels_c


def _default_name() -> str:
    forced = os.environ.get("CROWDMAP_BACKEND", "").strip().lower()
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(f"CROWDMAP_BACKEND={forced!r} is not available")
        return forced
    return "compiled" if _kernels_c is not None else "numpy"


DEFAULT = _default_name()


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` (default: best available)."""
    if name is None:
        name = DEFAULT
    try:
        return _BACKENDS[name]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown backend {name!r}; available: {available_backends()}"
        ) from None
