"""Backend selection for the min-plus kernels.

The compiled extension is used when it was built; otherwise the NumPy
version takes over.  ``SPLDP_BACKEND=python`` (or ``compiled``) forces a
choice at import time; :func:`use` switches at run time.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled


def available() -> list:
    return sorted(BACKENDS)


def _initial() -> str:
    wanted = os.environ.get("SPLDP_BACKEND", "auto").lower()
    if wanted == "auto":
        return "compiled" if _compiled is not None else "python"
    if wanted not in BACKENDS:
        raise ImportError(f"SPLDP_BACKEND={wanted!r} is not available (have {available()})")
    return wanted


_current = _initial()


def current() -> str:
    return _current


def use(name: str) -> None:
    global _current
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available()})")
    _current = name


def get(name: str = None):
    return BACKENDS[name or _current]
