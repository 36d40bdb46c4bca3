"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when the
``CASEMINER_PURE_PYTHON`` environment variable is set to a non-empty value,
the pure-Python implementations are used. Both expose the same three
functions with identical results.
"""
from __future__ import annotations

import os

from caseminer import _pykernels

if os.environ.get("CASEMINER_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from caseminer import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

levenshtein = _impl.levenshtein
pairwise_levenshtein = _impl.pairwise_levenshtein
dbscan_labels = _impl.dbscan_labels


def available_backends() -> dict:
    """Map backend name to kernel module for every backend importable here."""
    backends = {"python": _pykernels}
    try:
        from caseminer import _ckernels
    except ImportError:
        pass
    else:
        backends["cython"] = _ckernels
    return backends
