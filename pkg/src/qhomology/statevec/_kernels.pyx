# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector kernels. Same op format as ``_pykernels.run``."""
import numpy as np

from ._pykernels import apply_reflect


def apply_1q(double complex[::1] s, int nq, int q, double complex m00, double complex m01,
             double complex m10, double complex m11, long long cmask, long long cval):
    cdef Py_ssize_t half = s.shape[0] >> 1
    cdef int t = nq - 1 - q
    cdef long long tbit = 1LL << t
    cdef long long low = tbit - 1
    cdef long long k, i0, i1
    cdef double complex a, b
    with nogil:
        for k in range(half):
            i0 = ((k >> t) << (t + 1)) | (k & low)
            if (i0 & cmask) != cval:
                continue
            i1 = i0 | tbit
            a = s[i0]
            b = s[i1]
            s[i0] = m00 * a + m01 * b
            s[i1] = m10 * a + m11 * b


def apply_x(double complex[::1] s, int nq, int q, long long cmask, long long cval):
    cdef Py_ssize_t half = s.shape[0] >> 1
    cdef int t = nq - 1 - q
    cdef long long tbit = 1LL << t
    cdef long long low = tbit - 1
    cdef long long k, i0, i1
    cdef double complex a
    with nogil:
        for k in range(half):
            i0 = ((k >> t) << (t + 1)) | (k & low)
            if (i0 & cmask) != cval:
                continue
            i1 = i0 | tbit
            a = s[i0]
            s[i0] = s[i1]
            s[i1] = a


def apply_phase(double complex[::1] s, int nq, int q, double complex f,
                long long cmask, long long cval):
    cdef Py_ssize_t half = s.shape[0] >> 1
    cdef int t = nq - 1 - q
    cdef long long tbit = 1LL << t
    cdef long long low = tbit - 1
    cdef long long k, i1
    with nogil:
        for k in range(half):
            i1 = ((k >> t) << (t + 1)) | (k & low) | tbit
            if (i1 & cmask) != cval:
                continue
            s[i1] = s[i1] * f


def apply_perm(double complex[::1] s, double complex[::1] buf, int nq, int q0, int width,
               const long long[::1] table, long long cmask, long long cval):
    cdef Py_ssize_t n = s.shape[0]
    cdef int shift = nq - q0 - width
    cdef long long rmask = ((1LL << width) - 1) << shift
    cdef long long i, j
    with nogil:
        for i in range(n):
            if (i & cmask) == cval:
                j = (i & ~rmask) | (table[(i & rmask) >> shift] << shift)
                buf[j] = s[i]
            else:
                buf[i] = s[i]
        for i in range(n):
            s[i] = buf[i]


def apply_diag(double complex[::1] s, int nq, int q0, int width,
               const double complex[::1] diag, long long cmask, long long cval):
    cdef Py_ssize_t n = s.shape[0]
    cdef int shift = nq - q0 - width
    cdef long long rmask = ((1LL << width) - 1) << shift
    cdef long long i
    with nogil:
        for i in range(n):
            if (i & cmask) == cval:
                s[i] = s[i] * diag[(i & rmask) >> shift]


def run(ops, state, int nq):
    buf = None
    for code, q, width, payload, cmask, cval, controls in ops:
        if code == 0:
            apply_1q(state, nq, q, payload[0, 0], payload[0, 1], payload[1, 0], payload[1, 1],
                     cmask, cval)
        elif code == 1:
            apply_x(state, nq, q, cmask, cval)
        elif code == 2:
            apply_phase(state, nq, q, payload, cmask, cval)
        elif code == 3:
            if buf is None:
                buf = np.empty_like(state)
            apply_perm(state, buf, nq, q, width, payload, cmask, cval)
        elif code == 4:
            apply_diag(state, nq, q, width, payload, cmask, cval)
        else:
            apply_reflect(state, nq, q, width, payload, controls)
