# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stencil kernels.

Statement-for-statement mirror of _stencils_py.py; see that module for the
operator definitions and ghost-node conventions.  Out-of-range neighbors
are zero (Dirichlet ghosts) except the cylinder axis in cyl_centered,
which reflects the first radial node.
"""

import numpy as np


cdef inline double at3(const double[:, :, ::1] u, Py_ssize_t i, Py_ssize_t j,
                       Py_ssize_t k) noexcept nogil:
    if (i < 0 or j < 0 or k < 0 or i >= u.shape[0] or j >= u.shape[1]
            or k >= u.shape[2]):
        return 0.0
    return u[i, j, k]


cdef inline double at2(const double[:, ::1] u, Py_ssize_t j,
                       Py_ssize_t k) noexcept nogil:
    if j < 0 or k < 0 or j >= u.shape[0] or k >= u.shape[1]:
        return 0.0
    return u[j, k]


def box_direct(const double[:, :, ::1] u, const double[::1] x,
               const double[::1] y, double hx, double hy, double ht,
               double mixed_sign, double[:, :, ::1] out):
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nt = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double hx2 = hx * hx, hy2 = hy * hy, ht2 = ht * ht
    cdef double cxt = 4.0 * hx * ht, cyt = 4.0 * hy * ht
    cdef double xv, yv, c, uxx, uyy, utt, uxt, uyt
    with nogil:
        for i in range(nx):
            xv = x[i]
            for j in range(ny):
                yv = y[j]
                for k in range(nt):
                    c = u[i, j, k]
                    uxx = (at3(u, i + 1, j, k) - 2.0 * c + at3(u, i - 1, j, k)) / hx2
                    uyy = (at3(u, i, j + 1, k) - 2.0 * c + at3(u, i, j - 1, k)) / hy2
                    utt = (at3(u, i, j, k + 1) - 2.0 * c + at3(u, i, j, k - 1)) / ht2
                    uxt = (at3(u, i + 1, j, k + 1) - at3(u, i + 1, j, k - 1)
                           - at3(u, i - 1, j, k + 1) + at3(u, i - 1, j, k - 1)) / cxt
                    uyt = (at3(u, i, j + 1, k + 1) - at3(u, i, j + 1, k - 1)
                           - at3(u, i, j - 1, k + 1) + at3(u, i, j - 1, k - 1)) / cyt
                    out[i, j, k] = (uxx + uyy + 4.0 * (xv * xv + yv * yv) * utt
                                    + 4.0 * yv * uxt - mixed_sign * 4.0 * xv * uyt)


cdef void _first_x(const double[:, :, ::1] u, const double[::1] y, double hx,
                   double ht, double[:, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nt = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double tx = 2.0 * hx, tt = 2.0 * ht, y2
    for i in range(nx):
        for j in range(ny):
            y2 = 2.0 * y[j]
            for k in range(nt):
                out[i, j, k] = ((at3(u, i + 1, j, k) - at3(u, i - 1, j, k)) / tx
                                + y2 * (at3(u, i, j, k + 1)
                                        - at3(u, i, j, k - 1)) / tt)


cdef void _first_y(const double[:, :, ::1] u, const double[::1] x, double hy,
                   double ht, double[:, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t nx = u.shape[0], ny = u.shape[1], nt = u.shape[2]
    cdef Py_ssize_t i, j, k
    cdef double ty = 2.0 * hy, tt = 2.0 * ht, x2
    for i in range(nx):
        x2 = 2.0 * x[i]
        for j in range(ny):
            for k in range(nt):
                out[i, j, k] = ((at3(u, i, j + 1, k) - at3(u, i, j - 1, k)) / ty
                                - x2 * (at3(u, i, j, k + 1)
                                        - at3(u, i, j, k - 1)) / tt)


def box_composed(const double[:, :, ::1] u, const double[::1] x,
                 const double[::1] y, double hx, double hy, double ht,
                 double[:, :, ::1] out):
    cdef double[:, :, ::1] a = np.empty_like(np.asarray(u))
    cdef double[:, :, ::1] b = np.empty_like(np.asarray(u))
    cdef double[:, :, ::1] xa = np.empty_like(np.asarray(u))
    cdef Py_ssize_t i, j, k
    with nogil:
        _first_x(u, y, hx, ht, a)
        _first_y(u, x, hy, ht, b)
        _first_x(a, y, hx, ht, xa)
        _first_y(b, x, hy, ht, out)
        for i in range(u.shape[0]):
            for j in range(u.shape[1]):
                for k in range(u.shape[2]):
                    out[i, j, k] = xa[i, j, k] + out[i, j, k]


def cyl_centered(const double[:, ::1] u, const double[::1] r, double dr,
                 double dtau, double two_n_minus_1, double[:, ::1] out):
    cdef Py_ssize_t nr = u.shape[0], nt = u.shape[1]
    cdef Py_ssize_t j, k
    cdef double dr2 = dr * dr, tdr = 2.0 * dr, dt2 = dtau * dtau
    cdef double c, d2r, d1r, d2t, lo, cn, c4
    with nogil:
        for j in range(nr):
            cn = two_n_minus_1 / r[j]
            c4 = 4.0 * (r[j] * r[j])
            for k in range(nt):
                c = u[j, k]
                # even reflection across the axis at j = 0
                lo = u[0, k] if j == 0 else u[j - 1, k]
                d2r = (at2(u, j + 1, k) - 2.0 * c + lo) / dr2
                d1r = (at2(u, j + 1, k) - lo) / tdr
                d2t = (at2(u, j, k + 1) - 2.0 * c + at2(u, j, k - 1)) / dt2
                out[j, k] = d2r + cn * d1r + c4 * d2t


def cyl_flux(const double[:, ::1] u, const double[::1] r, double dr,
             double dtau, double two_n_minus_1, double[:, ::1] out):
    cdef Py_ssize_t nr = u.shape[0], nt = u.shape[1]
    cdef Py_ssize_t j, k
    cdef double dt2 = dtau * dtau
    cdef double c, d2t, apj, amj, c4, rp, rm, wm
    with nogil:
        for j in range(nr):
            rp = r[j] + 0.5 * dr
            rm = r[j] - 0.5 * dr
            wm = r[j] ** two_n_minus_1 * (dr * dr)
            apj = rp ** two_n_minus_1 / wm
            amj = rm ** two_n_minus_1 / wm
            c4 = 4.0 * (r[j] * r[j])
            for k in range(nt):
                c = u[j, k]
                d2t = (at2(u, j, k + 1) - 2.0 * c + at2(u, j, k - 1)) / dt2
                out[j, k] = (apj * (at2(u, j + 1, k) - c)
                             - amj * (c - at2(u, j - 1, k)) + c4 * d2t)
