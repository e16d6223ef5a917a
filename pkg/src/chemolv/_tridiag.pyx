# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Thomas solver; same contract as ``_tridiag_py.solve_batch``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

from .errors import SingularSystem

cnp.import_array()

cdef double PIVOT_RTOL = 1e-14


def solve_batch(const double[:, ::1] sub, const double[:, ::1] diag,
                const double[:, ::1] sup,
                const double[:, ::1] rhs):
    cdef Py_ssize_t B = rhs.shape[0], N = rhs.shape[1]
    cdef Py_ssize_t b, i, bad_row = -1
    cdef double piv, tiny, m
    out = np.empty((B, N))
    cdef double[:, ::1] x = out
    cdef double[::1] cp = np.empty(N)

    with nogil:
        for b in range(B):
            tiny = 0.0
            for i in range(N):
                m = fabs(diag[b, i])
                if m > tiny:
                    tiny = m
            tiny = tiny * PIVOT_RTOL
            piv = diag[b, 0]
            if fabs(piv) <= tiny:
                bad_row = 0
                break
            cp[0] = sup[b, 0] / piv
            x[b, 0] = rhs[b, 0] / piv
            for i in range(1, N):
                piv = diag[b, i] - sub[b, i] * cp[i - 1]
                if fabs(piv) <= tiny:
                    bad_row = i
                    break
                cp[i] = sup[b, i] / piv
                x[b, i] = (rhs[b, i] - sub[b, i] * x[b, i - 1]) / piv
            if bad_row >= 0:
                break
            for i in range(N - 2, -1, -1):
                x[b, i] = x[b, i] - cp[i] * x[b, i + 1]
    if bad_row >= 0:
        raise SingularSystem(f"zero pivot in row {bad_row}")
    return out
