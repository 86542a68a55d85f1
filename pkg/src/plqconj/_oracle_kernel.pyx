# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid maximum: out[j] = max_i S[j].X[i] - F[i]."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def grid_max(const double[:, ::1] S, const double[:, ::1] X, const double[::1] F):
    cdef Py_ssize_t m = S.shape[0], n = X.shape[0], i, j
    cdef double s0, s1, best, v
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for j in range(m):
            s0 = S[j, 0]
            s1 = S[j, 1]
            best = -INFINITY
            for i in range(n):
                v = s0 * X[i, 0] + s1 * X[i, 1] - F[i]
                if v > best:
                    best = v
            o[j] = best
    return out
