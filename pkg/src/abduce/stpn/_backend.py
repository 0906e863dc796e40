"""Kernel backend selection.

The compiled extension is preferred when present; the numpy fallback is
arithmetically identical.  ``ABDUCE_STP_BACKEND=python`` forces the
fallback (used by the benchmark and by backend-parity tests).
"""

from __future__ import annotations

import os

from . import _kernel_py

_forced = os.environ.get("ABDUCE_STP_BACKEND", "").lower()

if _forced in ("", "cython", "c"):
    try:
        from . import _kernel_cy as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _forced:
            raise
        _impl = _kernel_py
elif _forced in ("python", "py"):
    _impl = _kernel_py
else:
    raise RuntimeError(f"unknown ABDUCE_STP_BACKEND value: {_forced!r}")

BACKEND = _impl.BACKEND
CONSISTENT = _impl.CONSISTENT
INCONSISTENT = _impl.INCONSISTENT
closure = _impl.closure
update_edges = _impl.update_edges
