# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: polyline crossings and orbit iteration."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fmin, fmax

cnp.import_array()


cdef void _chunk_boxes(const double[:, ::1] pts, Py_ssize_t chunk,
                       double[:, ::1] box) noexcept nogil:
    cdef Py_ssize_t nseg = pts.shape[0] - 1
    cdef Py_ssize_t c, i, i0, i1
    for c in range(box.shape[0]):
        i0 = c * chunk
        i1 = i0 + chunk
        if i1 > nseg:
            i1 = nseg
        box[c, 0] = pts[i0, 0]
        box[c, 1] = pts[i0, 0]
        box[c, 2] = pts[i0, 1]
        box[c, 3] = pts[i0, 1]
        for i in range(i0, i1 + 1):
            box[c, 0] = fmin(box[c, 0], pts[i, 0])
            box[c, 1] = fmax(box[c, 1], pts[i, 0])
            box[c, 2] = fmin(box[c, 2], pts[i, 1])
            box[c, 3] = fmax(box[c, 3], pts[i, 1])


def segment_crossings(const double[:, ::1] A, const double[:, ::1] B, Py_ssize_t chunk=64):
    """All proper crossings between polylines A and B.

    Returns (i, j, t, u): segment i of A meets segment j of B at
    A[i] + t (A[i+1] - A[i]) with t, u in [0, 1).
    """
    cdef Py_ssize_t na = A.shape[0] - 1, nb = B.shape[0] - 1
    if na < 1 or nb < 1:
        e = np.empty(0, dtype=np.intp)
        return e, e.copy(), np.empty(0), np.empty(0)
    cdef Py_ssize_t ca = (na + chunk - 1) // chunk, cb = (nb + chunk - 1) // chunk
    cdef double[:, ::1] boxa = np.empty((ca, 4))
    cdef double[:, ::1] boxb = np.empty((cb, 4))
    _chunk_boxes(A, chunk, boxa)
    _chunk_boxes(B, chunk, boxb)

    out_i, out_j, out_t, out_u = [], [], [], []
    cdef Py_ssize_t p, q, i, j, i1, j1
    cdef double px, py, rx, ry, qx, qy, sx, sy, den, t, u, wx, wy
    for p in range(ca):
        for q in range(cb):
            if (boxa[p, 1] < boxb[q, 0] or boxb[q, 1] < boxa[p, 0] or
                    boxa[p, 3] < boxb[q, 2] or boxb[q, 3] < boxa[p, 2]):
                continue
            i1 = min((p + 1) * chunk, na)
            j1 = min((q + 1) * chunk, nb)
            for i in range(p * chunk, i1):
                px = A[i, 0]
                py = A[i, 1]
                rx = A[i + 1, 0] - px
                ry = A[i + 1, 1] - py
                for j in range(q * chunk, j1):
                    qx = B[j, 0]
                    qy = B[j, 1]
                    sx = B[j + 1, 0] - qx
                    sy = B[j + 1, 1] - qy
                    den = rx * sy - ry * sx
                    if den == 0.0:
                        continue
                    wx = qx - px
                    wy = qy - py
                    t = (wx * sy - wy * sx) / den
                    if t < 0.0 or t >= 1.0:
                        continue
                    u = (wx * ry - wy * rx) / den
                    if u < 0.0 or u >= 1.0:
                        continue
                    out_i.append(i)
                    out_j.append(j)
                    out_t.append(t)
                    out_u.append(u)
    return (np.asarray(out_i, dtype=np.intp), np.asarray(out_j, dtype=np.intp),
            np.asarray(out_t, dtype=float), np.asarray(out_u, dtype=float))


def iterate_orbits(double[::1] x, double[::1] y, double a, double b, Py_ssize_t n,
                   bint inverse=False):
    """Apply the map (or its inverse) n times to every point, in place."""
    cdef Py_ssize_t i, k, m = x.shape[0]
    cdef double xi, yi, xn
    cdef double binv = 1.0 / b if inverse else 0.0
    with nogil:
        for i in range(m):
            xi = x[i]
            yi = y[i]
            if inverse:
                for k in range(n):
                    xn = yi
                    yi = (yi * yi - a - xi) * binv
                    xi = xn
            else:
                for k in range(n):
                    xn = xi * xi - a - b * yi
                    yi = xi
                    xi = xn
            x[i] = xi
            y[i] = yi
