"""Pure-Python kernels for integer-order Bessel functions of complex argument.

This is the reference backend; ``_core.pyx`` mirrors it line for line in
Cython. Everything here works on the closed right half-plane and returns
exponentially scaled values; reflection to the left half-plane and the public
scaling conventions live in the package ``__init__``.

Regions (``r = |z|``):

* ``r <= SERIES_RADIUS``: ascending series for ``I_m``, ``K_0`` and ``K_1``.
* ``SERIES_RADIUS < r < ASYMPTOTIC_RADIUS``: Miller backward recurrence for
  ``I_m`` normalised with the Neumann sum ``e^z = I_0 + 2 sum I_k``; Steed's
  continued fraction (CF2) for ``K_0`` and ``K_1``.
* ``r >= ASYMPTOTIC_RADIUS``: Hankel asymptotic series for ``I_0``, ``I_1``,
  ``K_0`` and ``K_1``; Miller ratios carry ``I`` to higher order.

``K_m`` for ``m >= 2`` always comes from forward recurrence.
"""

import cmath
import math

import numpy as np

SERIES_RADIUS = 2.0
ASYMPTOTIC_RADIUS = 17.0
EULER_GAMMA = 0.57721566490153286061
EPS = 1e-17
MAX_CF_ITER = 20000
_RESCALE = 1e200


def _i_series(m, z):
    """e^{-z} I_m(z) from the ascending series (small |z|)."""
    y = 0.25 * z * z
    term = (0.5 * z) ** m / math.factorial(m) if m else 1.0 + 0j
    total = term
    k = 0
    while True:
        k += 1
        term = term * y / (k * (k + m))
        total += term
        if abs(term) <= EPS * abs(total):
            break
    return total * cmath.exp(-z)


def _k01_series(z):
    """(e^z K_0(z), e^z K_1(z)) from the logarithmic series, |z| <= 2."""
    y = 0.25 * z * z
    lg = cmath.log(0.5 * z)
    i0 = 1.0 + 0j
    i1 = 0.5 * z
    t0 = 1.0 + 0j
    t1 = 0.5 * z
    s0 = 0j
    s1 = (-2.0 * EULER_GAMMA + 1.0) + 0j  # psi(1) + psi(2) for k = 0
    harm = 0.0
    k = 0
    while True:
        k += 1
        t0 = t0 * y / (k * k)
        t1 = t1 * y / (k * (k + 1))
        harm += 1.0 / k
        i0 += t0
        i1 += t1
        s0 += t0 * harm
        dpsi = -2.0 * EULER_GAMMA + 2.0 * harm + 1.0 / (k + 1)
        ts1 = (t1 / (0.5 * z)) * dpsi
        s1 += ts1
        if abs(t0) <= EPS * abs(i0) and abs(ts1) <= EPS * abs(s1):
            break
    k0 = -(lg + EULER_GAMMA) * i0 + s0
    k1 = 1.0 / z + lg * i1 - 0.25 * z * s1
    ez = cmath.exp(z)
    return k0 * ez, k1 * ez


def _k01_steed(z):
    """(e^z K_0(z), e^z K_1(z)) by Steed's CF2 (Thompson-Barnett), |z| > 2."""
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = d
    delh = d
    q1 = 0j
    q2 = 1.0 + 0j
    a1 = 0.25
    q = a1 + 0j
    c = a1 + 0j
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, MAX_CF_ITER):
        a -= 2 * (i - 1)
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
        if abs(dels) < EPS * abs(s):
            break
    else:
        raise ArithmeticError("CF2 for K_0, K_1 did not converge at z=%r" % (z,))
    h = a1 * h
    k0 = cmath.sqrt(math.pi / (2.0 * z)) / s
    k1 = k0 * (z + 0.5 - h) / z
    return k0, k1


def _hankel_series(m, z, alternate):
    """Sum a_k(m) / z^k (or with alternating signs) until it stops improving."""
    mu = 4.0 * m * m
    term = 1.0 + 0j
    total = term
    prev = abs(term)
    sign = -1.0 if alternate else 1.0
    for k in range(1, 200):
        term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * z) * sign
        at = abs(term)
        if at > prev:
            break
        total += term
        if at <= EPS * abs(total):
            break
        prev = at
    return total


def _k01_asymptotic(z):
    pre = cmath.sqrt(math.pi / (2.0 * z))
    return pre * _hankel_series(0, z, False), pre * _hankel_series(1, z, False)


def _i01_asymptotic(z):
    """(e^{-z} I_0, e^{-z} I_1) including the exponentially small branch."""
    pre = 1.0 / cmath.sqrt(2.0 * math.pi * z)
    out = []
    for m in (0, 1):
        val = _hankel_series(m, z, True)
        if z.imag != 0.0:
            sgn = 1.0 if z.imag > 0.0 else -1.0
            val += sgn * 1j * (-1) ** m * cmath.exp(-2.0 * z) * _hankel_series(m, z, False)
        out.append(pre * val)
    return out[0], out[1]


def _miller(mmax, z):
    """Unnormalised backward-recurrence values f_0..f_mmax and Neumann sum."""
    az = abs(z)
    n0 = max(mmax, int(az))
    n = n0 + 20 + int(math.sqrt(40.0 * n0))
    f_next = 0j
    f = 1e-30 + 0j
    vals = [0j] * (mmax + 1)
    if n <= mmax:
        vals[n] = f
    total = 2.0 * f
    two_over_z = 2.0 / z
    for k in range(n, 0, -1):
        f_prev = k * two_over_z * f + f_next
        f_next = f
        f = f_prev
        if k - 1 <= mmax:
            vals[k - 1] = f
        total += f if k == 1 else 2.0 * f
        if abs(f) > _RESCALE:
            f /= _RESCALE
            f_next /= _RESCALE
            total /= _RESCALE
            for j in range(k - 1, mmax + 1):
                vals[j] /= _RESCALE
    return vals, total


def i_seq_right(mmax, z):
    """[e^{-z} I_k(z) for k in 0..mmax], requires Re z >= 0."""
    r = abs(z)
    if r == 0.0:
        return [1.0 + 0j] + [0j] * mmax
    if r <= SERIES_RADIUS:
        return [_i_series(k, z) for k in range(mmax + 1)]
    vals, total = _miller(mmax, z)
    if r < ASYMPTOTIC_RADIUS:
        return [v / total for v in vals]
    i0, i1 = _i01_asymptotic(z)
    if mmax == 0:
        return [i0]
    if abs(i0) >= abs(i1):
        scale = i0 / vals[0]
    else:
        scale = i1 / vals[1]
    out = [v * scale for v in vals]
    out[0] = i0
    out[1] = i1
    return out


def k_seq_right(mmax, z):
    """[e^{z} K_k(z) for k in 0..mmax], requires Re z >= 0 and z != 0."""
    r = abs(z)
    if r <= SERIES_RADIUS:
        k0, k1 = _k01_series(z)
    elif r < ASYMPTOTIC_RADIUS:
        k0, k1 = _k01_steed(z)
    else:
        k0, k1 = _k01_asymptotic(z)
    out = [k0, k1]
    two_over_z = 2.0 / z
    for k in range(1, mmax):
        out.append(out[k - 1] + k * two_over_z * out[k])
    return out[: mmax + 1]


def ive_seq(mmax, z):
    """[e^{-|Re z|} I_k(z) for k in 0..mmax] for any finite z."""
    if z.real >= 0.0:
        phase = cmath.exp(1j * z.imag)
        return [v * phase for v in i_seq_right(mmax, z)]
    w = -z
    phase = cmath.exp(1j * w.imag)
    return [(-1) ** k * v * phase for k, v in enumerate(i_seq_right(mmax, w))]


def kve_seq(mmax, z):
    """[e^{z} K_k(z) for k in 0..mmax]; z off the non-positive real axis."""
    if z.real >= 0.0:
        return k_seq_right(mmax, z)
    w = -z
    kw = k_seq_right(mmax, w)
    iw = i_seq_right(mmax, w)
    e2w = cmath.exp(-2.0 * w)
    sgn = -1.0 if z.imag > 0.0 else 1.0
    return [(-1) ** k * e2w * kw[k] + sgn * 1j * math.pi * iw[k] for k in range(mmax + 1)]


def jv_seq(mmax, z):
    """[e^{-|Im z|} J_k(z) for k in 0..mmax] via J_k(z) = i^k I_k(-iz)."""
    vals = ive_seq(mmax, -1j * z)
    return [(1j) ** k * v for k, v in enumerate(vals)]


def ive(m, z):
    return ive_seq(m, z)[m]


def kve(m, z):
    return kve_seq(m, z)[m]


def jve(m, z):
    return jv_seq(m, z)[m]


def _seq_array(seq, mmax, zs):
    zarr = np.ascontiguousarray(zs, dtype=np.complex128).ravel()
    out = np.empty((zarr.shape[0], mmax + 1), dtype=np.complex128)
    for i, z in enumerate(zarr):
        out[i] = seq(mmax, complex(z))
    return out


def ive_seq_array(mmax, zs):
    return _seq_array(ive_seq, mmax, zs)


def kve_seq_array(mmax, zs):
    return _seq_array(kve_seq, mmax, zs)


def jv_seq_array(mmax, zs):
    return _seq_array(jv_seq, mmax, zs)
