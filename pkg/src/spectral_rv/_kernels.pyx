# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.

Both kernels have a pure-numpy twin in :mod:`spectral_rv._kernels_py`;
:mod:`spectral_rv._backend` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, log, exp, sqrt, fabs, M_PI

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286061


def fourier_sum(const double[::1] x, const double complex[::1] w,
                const double[::1] s, double sign=1.0):
    """out[k] = sum_j w[j] * exp(i * sign * s[k] * x[j]).

    Each output is reduced sequentially over j, so results are bitwise
    reproducible for fixed inputs.
    """
    cdef Py_ssize_t nk = s.shape[0], nj = x.shape[0], k, j
    cdef double sk, ph, c, sn, acc_re, acc_im, wr, wi
    out = np.empty(nk, dtype=np.complex128)
    cdef double complex[::1] o = out
    for k in range(nk):
        sk = sign * s[k]
        acc_re = 0.0
        acc_im = 0.0
        for j in range(nj):
            ph = sk * x[j]
            c = cos(ph)
            sn = sin(ph)
            wr = w[j].real
            wi = w[j].imag
            acc_re += wr * c - wi * sn
            acc_im += wr * sn + wi * c
        o[k] = acc_re + 1j * acc_im
    return out


cdef double _k0_series(double x) nogil:
    # K0 = -(ln(x/2) + gamma) I0 + sum_k (x^2/4)^k / (k!)^2 * H_k
    cdef double q = 0.25 * x * x
    cdef double term = 1.0, i0 = 1.0, acc = 0.0, harm = 0.0
    cdef int k = 1
    while k < 200:
        term *= q / (<double>k * <double>k)
        harm += 1.0 / k
        i0 += term
        acc += term * harm
        if term * harm < 1e-17 * fabs(acc) and term < 1e-17 * i0:
            break
        k += 1
    return -(log(0.5 * x) + EULER_GAMMA) * i0 + acc


cdef double _k0_steed(double x) nogil:
    # Steed's continued fraction (Temme's CF2) at order zero, valid for x >= 2.
    cdef double b = 2.0 * (1.0 + x)
    cdef double d = 1.0 / b
    cdef double h = d, delh = d
    cdef double q1 = 0.0, q2 = 1.0
    cdef double a1 = 0.25
    cdef double q = a1, c = a1
    cdef double a = -a1
    cdef double s = 1.0 + q * delh
    cdef double qnew, dels
    cdef int i = 2
    while i < 10000:
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if fabs(dels / s) < 1e-17:
            break
        i += 1
    return sqrt(M_PI / (2.0 * x)) * exp(-x) / s


def bessel_k0(const double[::1] x, double split=2.0):
    """Vectorised K0 for strictly positive arguments (no domain check here)."""
    cdef Py_ssize_t n = x.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        if x[i] < split:
            o[i] = _k0_series(x[i])
        else:
            o[i] = _k0_steed(x[i])
    return out
