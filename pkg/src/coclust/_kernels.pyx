# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled group kernels: rowwise prox/projection and incidence products.

Mirrors ``coclust._kernels_py``; rows are groups, thresholds are per row.
Every kernel takes an optional preallocated C-contiguous output.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt
from libc.stdlib cimport free, malloc, qsort

cnp.import_array()


cdef int _cmp_desc(const void* a, const void* b) noexcept nogil:
    cdef double x = (<const double*> a)[0]
    cdef double y = (<const double*> b)[0]
    if x < y:
        return 1
    if x > y:
        return -1
    return 0


cdef inline object _out(out, Py_ssize_t m, Py_ssize_t d):
    if out is None:
        return np.empty((m, d), dtype=np.float64)
    return out


def block_soft_threshold(double[:, :] V, double[:] t, out=None):
    """Rowwise prox of t_i*||.||_2: scale row i by (1 - t_i/||row||_2)+."""
    cdef Py_ssize_t m = V.shape[0], d = V.shape[1], i, j
    out_arr = _out(out, m, d)
    cdef double[:, ::1] o = out_arr
    cdef double nrm, scale
    for i in range(m):
        nrm = 0.0
        for j in range(d):
            nrm += V[i, j] * V[i, j]
        nrm = sqrt(nrm)
        if nrm <= t[i]:
            for j in range(d):
                o[i, j] = 0.0
        else:
            scale = 1.0 - t[i] / nrm
            for j in range(d):
                o[i, j] = scale * V[i, j]
    return out_arr


def soft_threshold(double[:, :] V, double[:] t, out=None):
    """Elementwise soft threshold of row i at t_i."""
    cdef Py_ssize_t m = V.shape[0], d = V.shape[1], i, j
    out_arr = _out(out, m, d)
    cdef double[:, ::1] o = out_arr
    cdef double a
    for i in range(m):
        for j in range(d):
            a = fabs(V[i, j]) - t[i]
            if a <= 0.0:
                o[i, j] = 0.0
            elif V[i, j] > 0.0:
                o[i, j] = a
            else:
                o[i, j] = -a
    return out_arr


def clamp(double[:, :] V, double[:] r, out=None):
    """Rowwise projection onto the sup-norm ball: clip row i to [-r_i, r_i]."""
    cdef Py_ssize_t m = V.shape[0], d = V.shape[1], i, j
    out_arr = _out(out, m, d)
    cdef double[:, ::1] o = out_arr
    cdef double v
    for i in range(m):
        for j in range(d):
            v = V[i, j]
            if v > r[i]:
                v = r[i]
            elif v < -r[i]:
                v = -r[i]
            o[i, j] = v
    return out_arr


def project_l2_ball(double[:, :] V, double[:] r, out=None):
    """Rowwise Euclidean projection onto the l2 ball of radius r_i."""
    cdef Py_ssize_t m = V.shape[0], d = V.shape[1], i, j
    out_arr = _out(out, m, d)
    cdef double[:, ::1] o = out_arr
    cdef double nrm, scale
    for i in range(m):
        nrm = 0.0
        for j in range(d):
            nrm += V[i, j] * V[i, j]
        nrm = sqrt(nrm)
        if nrm > r[i]:
            scale = r[i] / nrm
            for j in range(d):
                o[i, j] = scale * V[i, j]
        else:
            for j in range(d):
                o[i, j] = V[i, j]
    return out_arr


def project_l1_ball(double[:, :] V, double[:] r, out=None):
    """Rowwise Euclidean projection onto the l1 ball of radius r_i.

    Exact sort-based algorithm on a per-row scratch buffer.
    """
    cdef Py_ssize_t m = V.shape[0], d = V.shape[1], i, j, rho
    out_arr = _out(out, m, d)
    cdef double[:, ::1] o = out_arr
    cdef double s, css, theta, a
    cdef double* buf = <double*> malloc(d * sizeof(double)) if d > 0 else NULL
    if d > 0 and buf == NULL:
        raise MemoryError("l1 projection scratch buffer")
    try:
        for i in range(m):
            s = 0.0
            for j in range(d):
                buf[j] = fabs(V[i, j])
                s += buf[j]
            if s <= r[i]:
                for j in range(d):
                    o[i, j] = V[i, j]
            elif r[i] <= 0.0:
                for j in range(d):
                    o[i, j] = 0.0
            else:
                qsort(buf, d, sizeof(double), _cmp_desc)
                css = 0.0
                theta = 0.0
                rho = -1
                for j in range(d):
                    css += buf[j]
                    if buf[j] - (css - r[i]) / (j + 1) > 0.0:
                        rho = j
                        theta = (css - r[i]) / (j + 1)
                for j in range(d):
                    a = fabs(V[i, j]) - theta
                    if a <= 0.0:
                        o[i, j] = 0.0
                    elif V[i, j] > 0.0:
                        o[i, j] = a
                    else:
                        o[i, j] = -a
    finally:
        if buf != NULL:
            free(buf)
    return out_arr


def edge_diff(double[:, :] U, Py_ssize_t[:] heads, Py_ssize_t[:] tails, out=None):
    """Per-edge row differences out[e] = U[heads[e]] - U[tails[e]]."""
    cdef Py_ssize_t m = heads.shape[0], d = U.shape[1], e, j, h, t
    out_arr = _out(out, m, d)
    cdef double[:, ::1] o = out_arr
    for e in range(m):
        h = heads[e]
        t = tails[e]
        for j in range(d):
            o[e, j] = U[h, j] - U[t, j]
    return out_arr


def edge_adj(double[:, :] R, Py_ssize_t[:] heads, Py_ssize_t[:] tails,
             Py_ssize_t n, out=None):
    """Adjoint scatter out[heads[e]] += R[e], out[tails[e]] -= R[e]."""
    cdef Py_ssize_t m = heads.shape[0], d = R.shape[1], e, j, h, t
    out_arr = _out(out, n, d)
    cdef double[:, ::1] o = out_arr
    for e in range(n):
        for j in range(d):
            o[e, j] = 0.0
    for e in range(m):
        h = heads[e]
        t = tails[e]
        for j in range(d):
            o[h, j] += R[e, j]
            o[t, j] -= R[e, j]
    return out_arr
