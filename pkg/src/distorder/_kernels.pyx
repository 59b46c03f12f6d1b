# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled causal Toeplitz products.

Every O(N^2) reduction in the package funnels through ``causal_dot``.
Each output is accumulated over ``j`` in ascending order so results are
reproducible. The loops run in scatter form (``j`` outer, ``n`` inner),
which keeps that order while letting the compiler vectorize the inner
loop instead of serializing on one accumulator.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def causal_dot(const double[::1] c, const double[::1] y):
    """out[n] = sum_{j=0}^{n} c[n-j] * y[j] for n = 0..len(y)-1."""
    cdef Py_ssize_t m = y.shape[0]
    if c.shape[0] < m:
        raise ValueError("coefficient vector shorter than operand")
    out = np.zeros(m, dtype=np.float64)
    cdef double[::1] o = out
    if m == 0:
        return out
    with nogil:
        _scatter(&c[0], &y[0], &o[0], m)
    return out


cdef inline void _scatter(const double* c, const double* y, double* o, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t n, j
    cdef double yj
    for j in range(m):
        yj = y[j]
        for n in range(j, m):
            o[n] += c[n - j] * yj


def causal_dot_many(const double[:, ::1] c, const double[::1] y):
    """Row-wise causal_dot of every coefficient row against one operand."""
    cdef Py_ssize_t r, m = y.shape[0], rows = c.shape[0]
    if c.shape[1] < m:
        raise ValueError("coefficient rows shorter than operand")
    out = np.zeros((rows, m), dtype=np.float64)
    cdef double[:, ::1] o = out
    if m == 0:
        return out
    with nogil:
        for r in range(rows):
            _scatter(&c[r, 0], &y[0], &o[r, 0], m)
    return out
