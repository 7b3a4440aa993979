"""Kernel backend selection.

The compiled extension is preferred when importable; set HYPERQ_KERNEL=py
(or =c) to force a backend.  Both backends expose the same names and
produce identical results.
"""

from __future__ import annotations

import os

from . import pure

_forced = os.environ.get("HYPERQ_KERNEL", "").strip().lower()

if _forced == "py":
    _impl = pure
else:
    try:
        from hyperq import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _forced == "c":
            raise ImportError(
                "HYPERQ_KERNEL=c requested but hyperq._ckernels is not built; "
                "run `pip install -e .` or `python setup.py build_ext --inplace`"
            ) from None
        _impl = pure

BACKEND: str = _impl.BACKEND
CloneAccumulator = _impl.CloneAccumulator
lhs_scan_axiom = _impl.lhs_scan_axiom
rhs_scan_axiom = _impl.rhs_scan_axiom


def get_backend(name: str):
    """Return a specific backend module ("c" or "py"); used by benchmarks/tests."""
    if name == "py":
        return pure
    if name == "c":
        from hyperq import _ckernels

        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
