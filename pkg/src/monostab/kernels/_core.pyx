# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled grid kernels.

Same contracts as monostab.kernels._numpy_impl; single-threaded typed
loops that avoid the temporaries of the vectorized fallback.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def neumann_laplacian(double[:, ::1] v, double hx, double hy, out=None):
    cdef Py_ssize_t nx = v.shape[0]
    cdef Py_ssize_t ny = v.shape[1]
    if out is None:
        out = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef double cx = 1.0 / (hx * hx)
    cdef double cy = 1.0 / (hy * hy)
    cdef Py_ssize_t i, j, il, ir, jd, ju
    for i in range(nx):
        il = 1 if i == 0 else i - 1
        ir = nx - 2 if i == nx - 1 else i + 1
        for j in range(ny):
            jd = 1 if j == 0 else j - 1
            ju = ny - 2 if j == ny - 1 else j + 1
            o[i, j] = cx * (2.0 * v[i, j] - v[il, j] - v[ir, j]) \
                + cy * (2.0 * v[i, j] - v[i, jd] - v[i, ju])
    return out


def dirichlet_laplacian(double[:, ::1] v, unsigned char[:, ::1] interior,
                        double hx, double hy, out=None):
    cdef Py_ssize_t nx = v.shape[0]
    cdef Py_ssize_t ny = v.shape[1]
    if out is None:
        out = np.zeros((nx, ny), dtype=np.float64)
    else:
        out.fill(0.0)
    cdef double[:, ::1] o = out
    cdef double cx = 1.0 / (hx * hx)
    cdef double cy = 1.0 / (hy * hy)
    cdef Py_ssize_t i, j
    for i in range(1, nx - 1):
        for j in range(1, ny - 1):
            if interior[i, j]:
                o[i, j] = cx * (2.0 * v[i, j] - v[i - 1, j] - v[i + 1, j]) \
                    + cy * (2.0 * v[i, j] - v[i, j - 1] - v[i, j + 1])
    return out


def clamp(double[:, ::1] v, double lo, double hi, out=None):
    cdef Py_ssize_t nx = v.shape[0]
    cdef Py_ssize_t ny = v.shape[1]
    if out is None:
        out = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double x
    for i in range(nx):
        for j in range(ny):
            x = v[i, j]
            if x < lo:
                x = lo
            elif x > hi:
                x = hi
            o[i, j] = x
    return out


def weighted_dot(double[:, ::1] a, double[:, ::1] b, double[:, ::1] w):
    cdef Py_ssize_t nx = a.shape[0]
    cdef Py_ssize_t ny = a.shape[1]
    cdef double acc = 0.0
    cdef Py_ssize_t i, j
    for i in range(nx):
        for j in range(ny):
            acc += a[i, j] * b[i, j] * w[i, j]
    return acc


def grad_inner(double[:, ::1] a, double[:, ::1] b,
               unsigned char[:, ::1] nonext, double hx, double hy):
    cdef Py_ssize_t nx = a.shape[0]
    cdef Py_ssize_t ny = a.shape[1]
    cdef double sx = 0.0
    cdef double sy = 0.0
    cdef Py_ssize_t i, j
    for i in range(nx - 1):
        for j in range(ny):
            if nonext[i, j] and nonext[i + 1, j]:
                sx += (a[i + 1, j] - a[i, j]) * (b[i + 1, j] - b[i, j])
    for i in range(nx):
        for j in range(ny - 1):
            if nonext[i, j] and nonext[i, j + 1]:
                sy += (a[i, j + 1] - a[i, j]) * (b[i, j + 1] - b[i, j])
    return sx * hy / hx + sy * hx / hy


def axpy(double alpha, double[:, ::1] x, double[:, ::1] y, out=None):
    cdef Py_ssize_t nx = x.shape[0]
    cdef Py_ssize_t ny = x.shape[1]
    if out is None:
        out = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t i, j
    for i in range(nx):
        for j in range(ny):
            o[i, j] = alpha * x[i, j] + y[i, j]
    return out
