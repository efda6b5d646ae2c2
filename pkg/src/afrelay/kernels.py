"""Backend selection for the hot kernels.

The compiled extension is used when importable; ``AFRELAY_BACKEND=python``
forces the NumPy fallback.
"""

from __future__ import annotations

import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _fallback}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def _default_backend() -> str:
    forced = os.environ.get("AFRELAY_BACKEND", "").strip().lower()
    if forced:
        if forced not in _BACKENDS:
            raise ImportError(f"AFRELAY_BACKEND={forced!r} not available; have {available_backends()}")
        return forced
    return "compiled" if _compiled is not None else "python"


BACKEND = _default_backend()


def get(name: str | None = None):
    """Kernel module for ``name`` (default: the active backend)."""
    name = name or BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown kernel backend {name!r}; have {available_backends()}") from None
