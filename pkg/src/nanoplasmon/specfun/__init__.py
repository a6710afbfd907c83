"""Integer-order Bessel functions I_m, K_m, J_m of complex argument.

Two interchangeable backends provide the kernels: a compiled Cython module
(``_core``) and a pure-Python reference (``_pycore``). The compiled one is
used when it imported successfully; :func:`use_backend` switches explicitly.

Domain
------
* All functions accept any finite complex ``z``; ``bessel_k`` additionally
  rejects the branch cut ``z <= 0`` on the real axis.
* Unscaled ``bessel_i`` and ``bessel_j`` raise :class:`OverflowError` once the
  exponential growth ``|Re z|`` (respectively ``|Im z|``) exceeds
  ``OVERFLOW_THRESHOLD = 700``; ``bessel_k`` raises for ``Re z < -700``. The
  ``*_scaled`` variants have no such limit.
* Accuracy target is 1e-12 relative on ``|z| <= 40`` and orders up to ~20.

Scaled conventions: ``ive = exp(-|Re z|) I``, ``kve = exp(z) K``,
``jve = exp(-|Im z|) J``.
"""

import cmath
import math
import threading

import numpy as np

from . import _pycore

try:
    from . import _core
except ImportError:  # pragma: no cover - exercised only without a compiler
    _core = None

OVERFLOW_THRESHOLD = 700.0

__all__ = [
    "BesselDomainError",
    "BranchCutError",
    "OVERFLOW_THRESHOLD",
    "active_backend",
    "available_backends",
    "use_backend",
    "bessel_i",
    "bessel_k",
    "bessel_j",
    "bessel_i_prime",
    "bessel_k_prime",
    "bessel_j_prime",
    "bessel_i_scaled",
    "bessel_k_scaled",
    "bessel_j_scaled",
    "bessel_i_seq_scaled",
    "bessel_k_seq_scaled",
    "bessel_j_seq",
    "bessel_k_seq_scaled_array",
    "bessel_i_seq_scaled_array",
    "bessel_j_seq_array",
]


class BesselDomainError(ValueError):
    """Non-finite argument or negative order."""


class BranchCutError(BesselDomainError):
    """K_m requested on the non-positive real axis."""


_lock = threading.Lock()
_backend = _core if _core is not None else _pycore


def available_backends():
    names = ["python"]
    if _core is not None:
        names.insert(0, "compiled")
    return names


def active_backend():
    return "compiled" if _backend is _core and _core is not None else "python"


def use_backend(name):
    """Select ``"compiled"`` or ``"python"`` kernels process-wide.

    Returns the previously active backend name so callers can restore it.
    """
    global _backend
    if name == "compiled":
        if _core is None:
            raise RuntimeError("compiled Bessel core is not built")
        new = _core
    elif name == "python":
        new = _pycore
    else:
        raise ValueError("unknown backend %r" % (name,))
    with _lock:
        old = active_backend()
        _backend = new
    return old


def _check(m, z):
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise BesselDomainError("order must be a non-negative integer, got %r" % (m,))
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise BesselDomainError("argument must be finite, got %r" % (z,))
    return int(m), z


def _check_k(m, z):
    m, z = _check(m, z)
    if z.imag == 0.0 and z.real <= 0.0:
        raise BranchCutError("K_m is undefined on the branch cut z <= 0 (z=%r)" % (z,))
    return m, z


def _unscale(value, exponent, what):
    if exponent > OVERFLOW_THRESHOLD:
        raise OverflowError("%s overflows for this argument (exponent %.1f)" % (what, exponent))
    return value * math.exp(exponent)


# ---- scaled sequences -----------------------------------------------------


def bessel_i_seq_scaled(mmax, z):
    """List ``[exp(-|Re z|) I_k(z) for k = 0..mmax]``."""
    mmax, z = _check(mmax, z)
    return _backend.ive_seq(mmax, z)


def bessel_k_seq_scaled(mmax, z):
    """List ``[exp(z) K_k(z) for k = 0..mmax]``."""
    mmax, z = _check_k(mmax, z)
    return _backend.kve_seq(mmax, z)


def bessel_j_seq(mmax, z):
    """List ``[exp(-|Im z|) J_k(z) for k = 0..mmax]``."""
    mmax, z = _check(mmax, z)
    return _backend.jv_seq(mmax, z)


def _as_array(zs):
    zarr = np.asarray(zs, dtype=np.complex128)
    if not np.all(np.isfinite(zarr)):
        raise BesselDomainError("arguments must be finite")
    return zarr


def bessel_i_seq_scaled_array(mmax, zs):
    """Vectorised :func:`bessel_i_seq_scaled`; returns shape ``(n, mmax+1)``."""
    mmax, _ = _check(mmax, 0.0)
    return _backend.ive_seq_array(mmax, _as_array(zs).ravel())


def bessel_k_seq_scaled_array(mmax, zs):
    """Vectorised :func:`bessel_k_seq_scaled`; returns shape ``(n, mmax+1)``."""
    mmax, _ = _check(mmax, 0.0)
    zarr = _as_array(zs).ravel()
    if np.any((zarr.imag == 0.0) & (zarr.real <= 0.0)):
        raise BranchCutError("K_m is undefined on the branch cut z <= 0")
    return _backend.kve_seq_array(mmax, zarr)


def bessel_j_seq_array(mmax, zs):
    """Vectorised :func:`bessel_j_seq`; returns shape ``(n, mmax+1)``."""
    mmax, _ = _check(mmax, 0.0)
    return _backend.jv_seq_array(mmax, _as_array(zs).ravel())


# ---- single values ----------------------------------------------------------


def bessel_i_scaled(m, z):
    return bessel_i_seq_scaled(m, z)[m]


def bessel_k_scaled(m, z):
    return bessel_k_seq_scaled(m, z)[m]


def bessel_j_scaled(m, z):
    return bessel_j_seq(m, z)[m]


def bessel_i(m, z):
    """Modified Bessel function of the first kind ``I_m(z)``.

    Parameters
    ----------
    m : int
        Non-negative order.
    z : complex
        Finite argument with ``|Re z| <= 700``.

    Returns
    -------
    complex

    Raises
    ------
    BesselDomainError
        For a non-finite argument or a negative order.
    OverflowError
        When ``|Re z|`` exceeds :data:`OVERFLOW_THRESHOLD`.
    """
    m, z = _check(m, z)
    return _unscale(_backend.ive_seq(m, z)[m], abs(z.real), "I_m")


def bessel_k(m, z):
    """Modified Bessel function of the second kind ``K_m(z)``.

    Principal branch, ``arg z`` in ``(-pi, pi]``. Points on the non-positive
    real axis raise :class:`BranchCutError`.
    """
    m, z = _check_k(m, z)
    return _unscale(_backend.kve_seq(m, z)[m] * cmath.exp(-1j * z.imag), -z.real, "K_m")


def bessel_j(m, z):
    """Bessel function of the first kind ``J_m(z)``; overflows past ``|Im z| = 700``."""
    m, z = _check(m, z)
    return _unscale(_backend.jv_seq(m, z)[m], abs(z.imag), "J_m")


def bessel_i_prime(m, z):
    """``I_m'(z) = (I_{m-1}(z) + I_{m+1}(z)) / 2`` with ``I_{-1} = I_1``."""
    m, z = _check(m, z)
    s = _backend.ive_seq(m + 1, z)
    lower = s[1] if m == 0 else s[m - 1]
    return _unscale(0.5 * (lower + s[m + 1]), abs(z.real), "I_m'")


def bessel_k_prime(m, z):
    """``K_m'(z) = -(K_{m-1}(z) + K_{m+1}(z)) / 2`` with ``K_{-1} = K_1``."""
    m, z = _check_k(m, z)
    s = _backend.kve_seq(m + 1, z)
    lower = s[1] if m == 0 else s[m - 1]
    val = -0.5 * (lower + s[m + 1]) * cmath.exp(-1j * z.imag)
    return _unscale(val, -z.real, "K_m'")


def bessel_j_prime(m, z):
    """``J_m'(z) = (J_{m-1}(z) - J_{m+1}(z)) / 2`` with ``J_{-1} = -J_1``."""
    m, z = _check(m, z)
    s = _backend.jv_seq(m + 1, z)
    lower = -s[1] if m == 0 else s[m - 1]
    return _unscale(0.5 * (lower - s[m + 1]), abs(z.imag), "J_m'")
