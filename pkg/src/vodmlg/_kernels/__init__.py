"""Hot inner loop of the tableau simplex.

The compiled ``_pivot`` extension is used when it was built; otherwise the
numpy implementation in ``_pivot_py`` is selected at import.  Both expose
``pivot(T, d, r, j)``.
"""

from __future__ import annotations

from . import _pivot_py

try:
    from . import _pivot as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = {"python": _pivot_py.pivot}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.pivot

backend = "cython" if _compiled is not None else "python"
pivot = BACKENDS[backend]


def use_backend(name: str) -> None:
    """Switch the pivot implementation for subsequent solves."""
    global backend, pivot
    if name not in BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}")
    backend = name
    pivot = BACKENDS[name]
