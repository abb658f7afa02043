# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernel loops in ``_kernels_py``.

Same signatures and conventions: weighted (M, N) matrices, zero at
coincident points.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt

cnp.import_array()

cdef double INV_2PI = 0.15915494309189535
cdef double INV_4PI = 0.07957747154594767


def single_layer(const double[:, ::1] tx, const double[:, ::1] sx,
                 const double[::1] sw):
    cdef Py_ssize_t m = tx.shape[0], n = sx.shape[0], i, j
    cdef double dx, dy, r2
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(m):
            for j in range(n):
                dx = tx[i, 0] - sx[j, 0]
                dy = tx[i, 1] - sx[j, 1]
                r2 = dx * dx + dy * dy
                if r2 == 0.0:
                    o[i, j] = 0.0
                else:
                    o[i, j] = -INV_4PI * log(r2) * sw[j]
    return out


def double_layer(const double[:, ::1] tx, const double[:, ::1] sx,
                 const double[:, ::1] sn, const double[::1] sw):
    cdef Py_ssize_t m = tx.shape[0], n = sx.shape[0], i, j
    cdef double dx, dy, r2
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(m):
            for j in range(n):
                dx = tx[i, 0] - sx[j, 0]
                dy = tx[i, 1] - sx[j, 1]
                r2 = dx * dx + dy * dy
                if r2 == 0.0:
                    o[i, j] = 0.0
                else:
                    o[i, j] = INV_2PI * (dx * sn[j, 0] + dy * sn[j, 1]) / r2 * sw[j]
    return out


def adjoint_double_layer(const double[:, ::1] tx, const double[:, ::1] tn,
                         const double[:, ::1] sx, const double[::1] sw):
    cdef Py_ssize_t m = tx.shape[0], n = sx.shape[0], i, j
    cdef double dx, dy, r2
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(m):
            for j in range(n):
                dx = tx[i, 0] - sx[j, 0]
                dy = tx[i, 1] - sx[j, 1]
                r2 = dx * dx + dy * dy
                if r2 == 0.0:
                    o[i, j] = 0.0
                else:
                    o[i, j] = -INV_2PI * (dx * tn[i, 0] + dy * tn[i, 1]) / r2 * sw[j]
    return out


def double_layer_dn(const double[:, ::1] tx, const double[:, ::1] tn,
                    const double[:, ::1] sx, const double[:, ::1] sn,
                    const double[::1] sw):
    cdef Py_ssize_t m = tx.shape[0], n = sx.shape[0], i, j
    cdef double dx, dy, r2, dot_s, dot_t, nn
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(m):
            for j in range(n):
                dx = tx[i, 0] - sx[j, 0]
                dy = tx[i, 1] - sx[j, 1]
                r2 = dx * dx + dy * dy
                if r2 == 0.0:
                    o[i, j] = 0.0
                else:
                    dot_s = dx * sn[j, 0] + dy * sn[j, 1]
                    dot_t = dx * tn[i, 0] + dy * tn[i, 1]
                    nn = tn[i, 0] * sn[j, 0] + tn[i, 1] * sn[j, 1]
                    o[i, j] = INV_2PI * (nn / r2 - 2.0 * (dot_s / r2) * (dot_t / r2)) * sw[j]
    return out


def green_disk(const double[:, ::1] tx, const double[:, ::1] sx,
               const double[::1] sw):
    cdef Py_ssize_t m = tx.shape[0], n = sx.shape[0], i, j
    cdef double dx, dy, r2, t2, s2, dot, q
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(m):
            t2 = tx[i, 0] * tx[i, 0] + tx[i, 1] * tx[i, 1]
            for j in range(n):
                dx = tx[i, 0] - sx[j, 0]
                dy = tx[i, 1] - sx[j, 1]
                r2 = dx * dx + dy * dy
                if r2 == 0.0:
                    o[i, j] = 0.0
                else:
                    s2 = sx[j, 0] * sx[j, 0] + sx[j, 1] * sx[j, 1]
                    dot = tx[i, 0] * sx[j, 0] + tx[i, 1] * sx[j, 1]
                    q = 1.0 - 2.0 * dot + t2 * s2
                    o[i, j] = -INV_4PI * (log(r2) - log(q)) * sw[j]
    return out


def green_disk_dnx_unit(const double[:, ::1] tx, const double[:, ::1] sx,
                        const double[::1] sw):
    cdef Py_ssize_t m = tx.shape[0], n = sx.shape[0], i, j
    cdef double dx, dy, r2, s2
    out = np.empty((m, n), dtype=np.float64)
    cdef double[:, ::1] o = out
    with nogil:
        for i in range(m):
            for j in range(n):
                dx = tx[i, 0] - sx[j, 0]
                dy = tx[i, 1] - sx[j, 1]
                r2 = dx * dx + dy * dy
                if r2 == 0.0:
                    o[i, j] = 0.0
                else:
                    s2 = sx[j, 0] * sx[j, 0] + sx[j, 1] * sx[j, 1]
                    o[i, j] = -INV_2PI * (1.0 - s2) / r2 * sw[j]
    return out


def points_in_all_disks(const double[:, ::1] px, const double[:, ::1] centers,
                        const double[::1] radii, double tol):
    cdef Py_ssize_t p = px.shape[0], k = centers.shape[0], i, j
    cdef double dx, dy, rr
    out = np.ones(p, dtype=np.bool_)
    cdef cnp.npy_bool[::1] o = out
    with nogil:
        for i in range(p):
            for j in range(k):
                dx = px[i, 0] - centers[j, 0]
                dy = px[i, 1] - centers[j, 1]
                rr = radii[j] + tol
                if dx * dx + dy * dy > rr * rr:
                    o[i] = 0
                    break
    return out


def points_in_convex_polygon(const double[:, ::1] px, const double[:, ::1] vertices,
                             double tol):
    cdef Py_ssize_t p = px.shape[0], m = vertices.shape[0], i, k, k1
    cdef double ex, ey, length, cross
    out = np.ones(p, dtype=np.bool_)
    cdef cnp.npy_bool[::1] o = out
    with nogil:
        for i in range(p):
            for k in range(m):
                k1 = k + 1 if k + 1 < m else 0
                ex = vertices[k1, 0] - vertices[k, 0]
                ey = vertices[k1, 1] - vertices[k, 1]
                length = sqrt(ex * ex + ey * ey)
                cross = ex * (px[i, 1] - vertices[k, 1]) - ey * (px[i, 0] - vertices[k, 0])
                if cross < -tol * length:
                    o[i] = 0
                    break
    return out
