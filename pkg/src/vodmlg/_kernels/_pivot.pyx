# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pivot kernel; same contract as ``_pivot_py.pivot``."""

from libc.math cimport fabs
from libc.stdlib cimport free, malloc

cdef double DROP_TOL = 1e-11


def pivot(double[:, ::1] T, double[::1] d, Py_ssize_t r, Py_ssize_t j):
    cdef Py_ssize_t m = T.shape[0]
    cdef Py_ssize_t n = T.shape[1]
    cdef Py_ssize_t i, k, c, nnz = 0
    cdef double piv = T[r, j]
    cdef double a, v
    cdef Py_ssize_t *idx = <Py_ssize_t *> malloc(n * sizeof(Py_ssize_t))
    if idx == NULL:
        raise MemoryError()
    try:
        for k in range(n):
            v = T[r, k]
            if v != 0.0:
                T[r, k] = v / piv
                idx[nnz] = k
                nnz += 1
        T[r, j] = 1.0

        for i in range(m):
            if i == r:
                continue
            a = T[i, j]
            if a == 0.0:
                continue
            for k in range(nnz):
                c = idx[k]
                v = T[i, c] - a * T[r, c]
                if fabs(v) < DROP_TOL:
                    v = 0.0
                T[i, c] = v
            T[i, j] = 0.0

        a = d[j]
        if a != 0.0:
            for k in range(nnz):
                c = idx[k]
                v = d[c] - a * T[r, c]
                if fabs(v) < DROP_TOL:
                    v = 0.0
                d[c] = v
            d[j] = 0.0
    finally:
        free(idx)
