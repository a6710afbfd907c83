# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for integer-order Bessel functions of complex argument.

Same regions, constants and scaling as ``_pycore``; see that module for the
algorithm description. The array entry points release the GIL.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, pi, exp
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef extern from "<complex.h>" nogil:
    double complex cexp(double complex)
    double complex clog(double complex)
    double complex csqrt(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef double SERIES_RADIUS = 2.0
cdef double ASYMPTOTIC_RADIUS = 17.0
cdef double EULER_GAMMA = 0.57721566490153286061
cdef double EPS = 1e-17
cdef int MAX_CF_ITER = 20000
cdef double RESCALE = 1e200
cdef double complex I1 = 1j


cdef double complex _i_series(int m, double complex z) nogil:
    cdef double complex y = 0.25 * z * z
    cdef double complex term = 1.0
    cdef double complex total
    cdef int k
    for k in range(1, m + 1):
        term = term * (0.5 * z) / k
    total = term
    k = 0
    while True:
        k += 1
        term = term * y / (k * (k + m))
        total = total + term
        if cabs(term) <= EPS * cabs(total):
            break
    return total * cexp(-z)


cdef void _k01_series(double complex z, double complex *k0, double complex *k1) nogil:
    cdef double complex y = 0.25 * z * z
    cdef double complex lg = clog(0.5 * z)
    cdef double complex i0 = 1.0, i1 = 0.5 * z, t0 = 1.0, t1 = 0.5 * z
    cdef double complex s0 = 0.0
    cdef double complex s1 = -2.0 * EULER_GAMMA + 1.0
    cdef double complex ts1, ez
    cdef double harm = 0.0, dpsi
    cdef int k = 0
    while True:
        k += 1
        t0 = t0 * y / (k * k)
        t1 = t1 * y / (k * (k + 1))
        harm += 1.0 / k
        i0 = i0 + t0
        i1 = i1 + t1
        s0 = s0 + t0 * harm
        dpsi = -2.0 * EULER_GAMMA + 2.0 * harm + 1.0 / (k + 1)
        ts1 = (t1 / (0.5 * z)) * dpsi
        s1 = s1 + ts1
        if cabs(t0) <= EPS * cabs(i0) and cabs(ts1) <= EPS * cabs(s1):
            break
    ez = cexp(z)
    k0[0] = (-(lg + EULER_GAMMA) * i0 + s0) * ez
    k1[0] = (1.0 / z + lg * i1 - 0.25 * z * s1) * ez


cdef int _k01_steed(double complex z, double complex *k0, double complex *k1) nogil:
    cdef double complex b = 2.0 * (1.0 + z)
    cdef double complex d = 1.0 / b
    cdef double complex h = d, delh = d
    cdef double complex q1 = 0.0, q2 = 1.0, qnew
    cdef double a1 = 0.25
    cdef double complex q = a1, c = a1
    cdef double a = -a1
    cdef double complex s = 1.0 + q * delh
    cdef double complex dels
    cdef int i
    cdef int ok = 0
    for i in range(2, MAX_CF_ITER):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if cabs(dels) < EPS * cabs(s):
            ok = 1
            break
    h = a1 * h
    k0[0] = csqrt(pi / (2.0 * z)) / s
    k1[0] = k0[0] * (z + 0.5 - h) / z
    return ok


cdef double complex _hankel_series(int m, double complex z, int alternate) nogil:
    cdef double mu = 4.0 * m * m
    cdef double complex term = 1.0
    cdef double complex total = 1.0
    cdef double prev = 1.0, at
    cdef double sign = -1.0 if alternate else 1.0
    cdef int k
    for k in range(1, 200):
        term = term * (mu - (2 * k - 1) * (2 * k - 1)) / (8.0 * k * z) * sign
        at = cabs(term)
        if at > prev:
            break
        total = total + term
        if at <= EPS * cabs(total):
            break
        prev = at
    return total


cdef void _i01_asymptotic(double complex z, double complex *i0, double complex *i1) nogil:
    cdef double complex pre = 1.0 / csqrt(2.0 * pi * z)
    cdef double complex v0 = _hankel_series(0, z, 1)
    cdef double complex v1 = _hankel_series(1, z, 1)
    cdef double sgn
    cdef double complex e2
    if cimag(z) != 0.0:
        sgn = 1.0 if cimag(z) > 0.0 else -1.0
        e2 = cexp(-2.0 * z)
        v0 = v0 + sgn * I1 * e2 * _hankel_series(0, z, 0)
        v1 = v1 - sgn * I1 * e2 * _hankel_series(1, z, 0)
    i0[0] = pre * v0
    i1[0] = pre * v1


cdef double complex _miller(int mmax, double complex z, double complex *vals) nogil:
    cdef double az = cabs(z)
    cdef int n0 = mmax if mmax > <int>az else <int>az
    cdef int n = n0 + 20 + <int>sqrt(40.0 * n0)
    cdef double complex f_next = 0.0, f = 1e-30, f_prev
    cdef double complex total
    cdef double complex two_over_z = 2.0 / z
    cdef int k, j
    for j in range(mmax + 1):
        vals[j] = 0.0
    if n <= mmax:
        vals[n] = f
    total = 2.0 * f
    for k in range(n, 0, -1):
        f_prev = k * two_over_z * f + f_next
        f_next = f
        f = f_prev
        if k - 1 <= mmax:
            vals[k - 1] = f
        if k == 1:
            total = total + f
        else:
            total = total + 2.0 * f
        if cabs(f) > RESCALE:
            f = f / RESCALE
            f_next = f_next / RESCALE
            total = total / RESCALE
            for j in range(k - 1, mmax + 1):
                vals[j] = vals[j] / RESCALE
    return total


cdef void _i_seq_right(int mmax, double complex z, double complex *out) nogil:
    """out[k] = e^{-z} I_k(z), Re z >= 0."""
    cdef double r = cabs(z)
    cdef double complex total, i0, i1, scale
    cdef int k
    if r == 0.0:
        out[0] = 1.0
        for k in range(1, mmax + 1):
            out[k] = 0.0
        return
    if r <= SERIES_RADIUS:
        for k in range(mmax + 1):
            out[k] = _i_series(k, z)
        return
    total = _miller(mmax, z, out)
    if r < ASYMPTOTIC_RADIUS:
        for k in range(mmax + 1):
            out[k] = out[k] / total
        return
    _i01_asymptotic(z, &i0, &i1)
    if mmax == 0:
        out[0] = i0
        return
    if cabs(i0) >= cabs(i1):
        scale = i0 / out[0]
    else:
        scale = i1 / out[1]
    for k in range(mmax + 1):
        out[k] = out[k] * scale
    out[0] = i0
    out[1] = i1


cdef int _k_seq_right(int mmax, double complex z, double complex *out) nogil:
    """out[k] = e^{z} K_k(z), Re z >= 0, z != 0. Needs room for 2 entries."""
    cdef double r = cabs(z)
    cdef double complex k0, k1
    cdef double complex two_over_z = 2.0 / z
    cdef int k
    cdef int ok = 1
    if r <= SERIES_RADIUS:
        _k01_series(z, &k0, &k1)
    elif r < ASYMPTOTIC_RADIUS:
        ok = _k01_steed(z, &k0, &k1)
    else:
        k0 = 0.0
        k1 = 0.0
        k0 = csqrt(pi / (2.0 * z)) * _hankel_series(0, z, 0)
        k1 = csqrt(pi / (2.0 * z)) * _hankel_series(1, z, 0)
    out[0] = k0
    out[1] = k1
    for k in range(1, mmax):
        out[k + 1] = out[k - 1] + k * two_over_z * out[k]
    return ok


cdef int _ive_seq(int mmax, double complex z, double complex *out) nogil:
    cdef double complex phase
    cdef double complex w
    cdef int k
    if creal(z) >= 0.0:
        _i_seq_right(mmax, z, out)
        phase = cexp(I1 * cimag(z))
        for k in range(mmax + 1):
            out[k] = out[k] * phase
        return 1
    w = -z
    _i_seq_right(mmax, w, out)
    phase = cexp(I1 * cimag(w))
    for k in range(mmax + 1):
        out[k] = out[k] * phase
        if k % 2 == 1:
            out[k] = -out[k]
    return 1


cdef int _kve_seq(int mmax, double complex z, double complex *out, double complex *work) nogil:
    """work needs mmax + 2 entries."""
    cdef double complex w, e2w
    cdef double sgn
    cdef int k, ok
    if creal(z) >= 0.0:
        return _k_seq_right(mmax, z, out)
    w = -z
    ok = _k_seq_right(mmax, w, out)
    _i_seq_right(mmax, w, work)
    e2w = cexp(-2.0 * w)
    sgn = -1.0 if cimag(z) > 0.0 else 1.0
    for k in range(mmax + 1):
        if k % 2 == 1:
            out[k] = -e2w * out[k] + sgn * I1 * pi * work[k]
        else:
            out[k] = e2w * out[k] + sgn * I1 * pi * work[k]
    return ok


cdef int _jv_seq(int mmax, double complex z, double complex *out) nogil:
    cdef double complex ik = 1.0
    cdef int k
    _ive_seq(mmax, -I1 * z, out)
    for k in range(mmax + 1):
        out[k] = ik * out[k]
        ik = ik * I1
    return 1


cdef inline int _buflen(int mmax):
    return mmax + 2 if mmax + 2 > 2 else 2


def ive_seq(int mmax, double complex z):
    cdef int n = _buflen(mmax)
    cdef double complex *buf = <double complex *>malloc(n * sizeof(double complex))
    try:
        _ive_seq(mmax, z, buf)
        return [buf[k] for k in range(mmax + 1)]
    finally:
        free(buf)


def kve_seq(int mmax, double complex z):
    cdef int n = _buflen(mmax)
    cdef double complex *buf = <double complex *>malloc(n * sizeof(double complex))
    cdef double complex *work = <double complex *>malloc(n * sizeof(double complex))
    cdef int ok
    try:
        ok = _kve_seq(mmax, z, buf, work)
        if not ok:
            raise ArithmeticError("CF2 for K_0, K_1 did not converge at z=%r" % (z,))
        return [buf[k] for k in range(mmax + 1)]
    finally:
        free(buf)
        free(work)


def jv_seq(int mmax, double complex z):
    cdef int n = _buflen(mmax)
    cdef double complex *buf = <double complex *>malloc(n * sizeof(double complex))
    try:
        _jv_seq(mmax, z, buf)
        return [buf[k] for k in range(mmax + 1)]
    finally:
        free(buf)


def ive(int m, double complex z):
    return ive_seq(m, z)[m]


def kve(int m, double complex z):
    return kve_seq(m, z)[m]


def jve(int m, double complex z):
    return jv_seq(m, z)[m]


def _seq_array(int kind, int mmax, zs):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zarr = np.ascontiguousarray(zs, dtype=np.complex128).ravel()
    cdef Py_ssize_t npts = zarr.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] res = np.empty((npts, mmax + 1), dtype=np.complex128)
    cdef int n = _buflen(mmax)
    cdef double complex *buf = <double complex *>malloc(n * sizeof(double complex))
    cdef double complex *work = <double complex *>malloc(n * sizeof(double complex))
    cdef Py_ssize_t i
    cdef int k
    cdef int bad = 0
    try:
        with nogil:
            for i in range(npts):
                if kind == 0:
                    _ive_seq(mmax, zarr[i], buf)
                elif kind == 1:
                    if not _kve_seq(mmax, zarr[i], buf, work):
                        bad = 1
                else:
                    _jv_seq(mmax, zarr[i], buf)
                for k in range(mmax + 1):
                    res[i, k] = buf[k]
    finally:
        free(buf)
        free(work)
    if bad:
        raise ArithmeticError("CF2 for K_0, K_1 did not converge")
    return res


def ive_seq_array(int mmax, zs):
    return _seq_array(0, mmax, zs)


def kve_seq_array(int mmax, zs):
    return _seq_array(1, mmax, zs)


def jv_seq_array(int mmax, zs):
    return _seq_array(2, mmax, zs)
