"""Hot-loop kernels: compiled extension when built, numpy fallback otherwise.

Set ``CHEMOLV_PURE=1`` to force the fallback.
"""
import os

import numpy as np

from . import _tridiag_py

BACKEND = "python"
_solve_batch = _tridiag_py.solve_batch

if os.environ.get("CHEMOLV_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _tridiag
    except ImportError:
        pass
    else:
        _solve_batch = _tridiag.solve_batch
        BACKEND = "cython"


def tridiag_solve_batch(sub, diag, sup, rhs, backend=None):
    """Solve ``(B, N)`` stacks of tridiagonal systems; returns a ``(B, N)`` array."""
    fn = _solve_batch
    if backend == "python":
        fn = _tridiag_py.solve_batch
    elif backend == "cython":
        from . import _tridiag
        fn = _tridiag.solve_batch
    args = [np.ascontiguousarray(a, dtype=float) for a in (sub, diag, sup, rhs)]
    return fn(*args)
