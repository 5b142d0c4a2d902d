"""Row-reduction kernel: compiled core with a pure-python fallback.

The compiled extension (``_native``, Cython) accelerates the dense
fraction-free integer RREF and the mod-p RREF; sparse reduction is
always pure python.  Set ``DEPTHTOWER_PURE=1`` to force the fallback.
"""

import os

from . import _fallback
from ._fallback import (
    monomial_relation_rref,
    relation_rref_sparse,
    sparse_kernel,
    sparse_rref,
)

if os.environ.get("DEPTHTOWER_PURE"):
    _impl = _fallback
else:
    try:
        from . import _native as _impl
    except ImportError:
        _impl = _fallback

rref_int = _impl.rref_int
rref_mod = _impl.rref_mod
BACKEND = _impl.BACKEND

__all__ = [
    "BACKEND",
    "monomial_relation_rref",
    "relation_rref_sparse",
    "rref_int",
    "rref_mod",
    "sparse_kernel",
    "sparse_rref",
]
