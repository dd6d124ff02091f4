"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``."""

import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061

# rows of the (s, x) phase matrix handled per block; bounds peak memory
_BLOCK_ELEMS = 1 << 22


def fourier_sum(x, w, s, sign=1.0):
    """out[k] = sum_j w[j] * exp(i * sign * s[k] * x[j])."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.complex128)
    s = np.ascontiguousarray(s, dtype=np.float64)
    out = np.empty(s.shape[0], dtype=np.complex128)
    rows = max(1, _BLOCK_ELEMS // max(1, x.shape[0]))
    for start in range(0, s.shape[0], rows):
        ph = np.multiply.outer(sign * s[start:start + rows], x)
        c = np.cos(ph)
        sn = np.sin(ph)
        re = c @ w.real - sn @ w.imag
        im = sn @ w.real + c @ w.imag
        out[start:start + rows] = re + 1j * im
    return out


def _k0_series(x):
    q = 0.25 * x * x
    term = 1.0
    i0 = 1.0
    acc = 0.0
    harm = 0.0
    for k in range(1, 200):
        term *= q / (k * k)
        harm += 1.0 / k
        i0 += term
        acc += term * harm
        if term * harm < 1e-17 * abs(acc) and term < 1e-17 * i0:
            break
    return -(math.log(0.5 * x) + EULER_GAMMA) * i0 + acc


def _k0_steed(x):
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 10000):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < 1e-17:
            break
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s


def bessel_k0(x, split=2.0):
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for i, xi in enumerate(x):
        out[i] = _k0_series(xi) if xi < split else _k0_steed(xi)
    return out
