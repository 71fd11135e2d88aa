"""Kernel selection: compiled ``_core`` when importable, else ``_pycore``.

Set ``XIDIM_PURE_PYTHON=1`` to force the fallback.  ``BACKEND`` names the
active implementation; ``backends()`` returns every importable one so tests
and the benchmark can compare them.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pycore

FOUND, NONE, BUDGET = _pycore.FOUND, _pycore.NONE, _pycore.BUDGET


def _load_compiled() -> ModuleType | None:
    try:
        from . import _core  # type: ignore[attr-defined]
    except ImportError:
        return None
    return _core


_compiled = _load_compiled()

if _compiled is not None and os.environ.get("XIDIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    _impl: ModuleType = _compiled
    BACKEND = "cython"
else:
    _impl = _pycore
    BACKEND = "python"


def backends() -> dict[str, ModuleType]:
    out = {"python": _pycore}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


def ord_dp(masks, width: int) -> int:
    return _impl.ord_dp(list(masks), width)


def cover_search(dist, radii, bound: int, node_budget: int):
    return _impl.cover_search(dist, list(radii), bound, node_budget)


def cover_search_box(coords, radii, bound: int, node_budget: int):
    return _impl.cover_search_box([tuple(int(v) for v in c) for c in coords], list(radii), bound, node_budget)
