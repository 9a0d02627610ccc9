# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_fallback`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport floor, isfinite, cos, sin, INFINITY

cnp.import_array()

cdef double POLE_TOL = 1e-14


def moebius_apply_array(double complex a, double complex b, double complex c,
                        double complex d, z):
    zarr = np.ascontiguousarray(z, dtype=np.complex128)
    out = np.empty_like(zarr)
    cdef const double complex[::1] zv = zarr.reshape(-1)
    cdef double complex[::1] ov = out.reshape(-1)
    cdef Py_ssize_t i, n = zv.shape[0]
    cdef double complex w, den, at_inf
    cdef double complex cinf = INFINITY
    if b == 0:
        at_inf = cinf
    else:
        at_inf = d / b
    with nogil:
        for i in range(n):
            w = zv[i]
            if not (isfinite(w.real) and isfinite(w.imag)):
                ov[i] = at_inf
                continue
            den = b * w + a
            if den.real * den.real + den.imag * den.imag < POLE_TOL * POLE_TOL:
                ov[i] = cinf
            else:
                ov[i] = (d * w + c) / den
    return out


cdef inline Py_ssize_t _clampi(Py_ssize_t v, Py_ssize_t lo, Py_ssize_t hi) nogil:
    if v < lo:
        return lo
    if v > hi:
        return hi
    return v


def bilinear_sample(img, row, col, double fill=0.0):
    src = np.ascontiguousarray(img, dtype=np.float64)
    squeeze = src.ndim == 2
    if squeeze:
        src = src[:, :, None]
    shape = np.broadcast(np.asarray(row), np.asarray(col)).shape
    r_arr = np.ascontiguousarray(np.broadcast_to(row, shape), dtype=np.float64).reshape(-1)
    c_arr = np.ascontiguousarray(np.broadcast_to(col, shape), dtype=np.float64).reshape(-1)
    cdef const double[:, :, ::1] s = src
    cdef const double[::1] rv = r_arr
    cdef const double[::1] cv = c_arr
    cdef Py_ssize_t h = s.shape[0], w = s.shape[1], nch = s.shape[2]
    out = np.empty((rv.shape[0], nch), dtype=np.float64)
    cdef double[:, ::1] o = out
    cdef Py_ssize_t p, ch, r0, c0, r1, c1
    cdef double r, c, fr, fc
    with nogil:
        for p in range(rv.shape[0]):
            r = rv[p]
            c = cv[p]
            if not (isfinite(r) and isfinite(c)) or r < -0.5 or r > h - 0.5 or c < -0.5 or c > w - 0.5:
                for ch in range(nch):
                    o[p, ch] = fill
                continue
            if r < 0:
                r = 0
            if r > h - 1:
                r = h - 1
            if c < 0:
                c = 0
            if c > w - 1:
                c = w - 1
            r0 = _clampi(<Py_ssize_t>floor(r), 0, h - 2 if h > 1 else 0)
            c0 = _clampi(<Py_ssize_t>floor(c), 0, w - 2 if w > 1 else 0)
            r1 = r0 + 1 if r0 + 1 < h else h - 1
            c1 = c0 + 1 if c0 + 1 < w else w - 1
            fr = r - r0
            fc = c - c0
            for ch in range(nch):
                o[p, ch] = ((s[r0, c0, ch] * (1 - fc) + s[r0, c1, ch] * fc) * (1 - fr)
                            + (s[r1, c0, ch] * (1 - fc) + s[r1, c1, ch] * fc) * fr)
    if squeeze:
        return out.reshape(shape)
    return out.reshape(shape + (nch,))


def render_sum(coef, wm, wn, du, dth):
    cdef const double complex[:, ::1] f = np.ascontiguousarray(coef, dtype=np.complex128)
    cdef const double[::1] fm = np.ascontiguousarray(wm, dtype=np.float64)
    cdef const double[::1] fn = np.ascontiguousarray(wn, dtype=np.float64)
    cdef const double[::1] pu = np.ascontiguousarray(du, dtype=np.float64)
    cdef const double[::1] pt = np.ascontiguousarray(dth, dtype=np.float64)
    cdef Py_ssize_t P = pu.shape[0], M = f.shape[0], N = f.shape[1]
    out = np.empty(P, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef double complex[::1] en = np.empty(N, dtype=np.complex128)
    cdef Py_ssize_t p, m, n
    cdef double ang
    cdef double complex acc, row, em
    with nogil:
        for p in range(P):
            for n in range(N):
                ang = fn[n] * pt[p]
                en[n] = cos(ang) + 1j * sin(ang)
            acc = 0
            for m in range(M):
                ang = fm[m] * pu[p]
                em = cos(ang) + 1j * sin(ang)
                row = 0
                for n in range(N):
                    row = row + f[m, n] * en[n]
                acc = acc + em * row
            o[p] = acc
    return out
