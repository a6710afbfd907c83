"""Guided surface plasmons of a circular metal nanowire.

Lengths are in units of ``1/k0`` throughout, so ``k0R`` is simply the wire
radius and wavevectors are in units of ``k0``. A mode with longitudinal
wavevector ``k`` has transverse constants ``kappa_j = sqrt(k**2 - eps_j)``
(principal root), where ``j = 1`` is the host and ``j = 2`` the metal. The
exterior field decays as ``K_m(kappa_1 rho)`` and is bound when
``Re kappa_1 > 0``.
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from . import specfun
from .materials import HOST_EPS, SILVER_EPS
from .numerics import ConvergenceError, damped_secant

EULER_GAMMA = 0.5772156649015329

# below this radius the quasi-static seed C/k0R is already inside the basin
DIRECT_SEED_RADIUS = 0.05
# continuation steps per decade when walking out to larger radii
CONTINUATION_STEPS_PER_DECADE = 20
ROOT_TOL = 1e-10
# largest radius the fundamental-mode solver accepts; the design range is
# k0R <= 1, the margin lets optimality checks look a factor 3 beyond it
MAX_K0R = 3.0


class BranchError(ValueError):
    """``Re kappa_1 <= 0``: the trial wavevector is not a bound mode."""


class SeedBasinError(ConvergenceError):
    """The iteration converged, but to a root far from its seed."""


class NoRootError(ArithmeticError):
    """A root search found nothing in its region."""


@dataclass(frozen=True)
class WireGeometry:
    """Radius and permittivities of a wire in a homogeneous host.

    ``eps2`` must have negative real part for a bound plasmon to exist; that
    condition is enforced by the solvers rather than here so that control
    cases (for example ``eps2 == eps1``) can still be scanned.
    """

    k0R: float
    eps1: complex = HOST_EPS
    eps2: complex = SILVER_EPS

    def __post_init__(self):
        if not (self.k0R > 0 and math.isfinite(self.k0R)):
            raise ValueError("k0R must be positive and finite, got %r" % (self.k0R,))
        for name in ("eps1", "eps2"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError("%s must be finite" % name)

    @property
    def conducting(self):
        return complex(self.eps2).real < 0

    def with_radius(self, k0R):
        return WireGeometry(k0R, self.eps1, self.eps2)


@dataclass(frozen=True)
class ModeSolution:
    m: int
    k_par: complex
    kappa1: complex
    kappa2: complex
    residual: float = 0.0
    iterations: int = 0


def transverse_constants(k_par, geom):
    k2 = complex(k_par) ** 2
    return cmath.sqrt(k2 - geom.eps1), cmath.sqrt(k2 - geom.eps2)


def make_mode(m, k_par, geom, residual=0.0, iterations=0):
    kappa1, kappa2 = transverse_constants(k_par, geom)
    return ModeSolution(m, complex(k_par), kappa1, kappa2, residual, iterations)


def _bound_kappas(k_par, geom):
    kappa1, kappa2 = transverse_constants(k_par, geom)
    if not kappa1.real > 0:
        raise BranchError("Re kappa1 = %.3e <= 0 at k_par=%r" % (kappa1.real, k_par))
    return kappa1, kappa2


def _ratio_i(m, z):
    """I_m'(z) / I_m(z)."""
    if z == 0:
        raise ZeroDivisionError("I_m'/I_m undefined at z = 0")
    s = specfun.bessel_i_seq_scaled(m + 1, z)
    lower = s[1] if m == 0 else s[m - 1]
    return 0.5 * (lower + s[m + 1]) / s[m]


def _ratio_k(m, z):
    """K_m'(z) / K_m(z)."""
    s = specfun.bessel_k_seq_scaled(m + 1, z)
    lower = s[1] if m == 0 else s[m - 1]
    return -0.5 * (lower + s[m + 1]) / s[m]


def mode_residual_m0(k_par, geom):
    """TM0 dispersion function of the wire.

    ``f = eps2 I0'(kappa2 R) / (kappa2 I0(kappa2 R))
    - eps1 K0'(kappa1 R) / (kappa1 K0(kappa1 R))``, built from scaled Bessel
    ratios so it never overflows.

    Raises
    ------
    BranchError
        If ``Re kappa_1 <= 0``.
    """
    kappa1, kappa2 = _bound_kappas(k_par, geom)
    R = geom.k0R
    return geom.eps2 * _ratio_i(0, kappa2 * R) / kappa2 - geom.eps1 * _ratio_k(0, kappa1 * R) / kappa1


def hybrid_matrix(m, k_par, geom):
    """4x4 boundary-condition matrix for azimuthal order ``m``.

    Unknowns are the longitudinal amplitudes ``[A2, B2, A1, B1]`` of
    ``E_z = A I_m`` / ``K_m`` and ``H_z = B I_m`` / ``K_m`` inside (2) and
    outside (1), each normalised by its value at the surface. Rows are
    continuity of ``E_z``, ``H_z``, ``E_phi`` and ``H_phi``.
    """
    kappa1, kappa2 = _bound_kappas(k_par, geom)
    R = geom.k0R
    rI = _ratio_i(m, kappa2 * R)
    rK = _ratio_k(m, kappa1 * R)
    q1 = -kappa1 * kappa1
    q2 = -kappa2 * kappa2
    a = 1j * k_par * m / R
    e1, e2 = geom.eps1, geom.eps2
    return np.array(
        [
            [1, 0, -1, 0],
            [0, 1, 0, -1],
            [a / q2, -kappa2 * rI / q2, -a / q1, kappa1 * rK / q1],
            [e2 * kappa2 * rI / q2, a / q2, -e1 * kappa1 * rK / q1, -a / q1],
        ],
        dtype=complex,
    )


def higher_mode_residual(m, k_par, geom):
    """Determinant of :func:`hybrid_matrix`; zero at a guided mode of order ``m``.

    Each row is divided by its largest entry first. That leaves the zeros in
    place but keeps the value O(1) near the light line, where the raw rows
    grow like ``1/kappa_1**2``.
    """
    if m < 1:
        raise ValueError("higher_mode_residual needs m >= 1; use mode_residual_m0 for m = 0")
    mat = hybrid_matrix(m, k_par, geom)
    mat /= np.abs(mat).max(axis=1, keepdims=True)
    return complex(np.linalg.det(mat))


def residual(m, k_par, geom):
    return mode_residual_m0(k_par, geom) if m == 0 else higher_mode_residual(m, k_par, geom)


# ---- quasi-static constant --------------------------------------------------


def quasistatic_residual(C, eps1, eps2):
    """``eps2/eps1 - 2 / ((gamma - ln 2 + ln C) C^2)``; zero at a valid ``C``."""
    C = complex(C)
    return eps2 / eps1 - 2.0 / ((EULER_GAMMA - math.log(2.0) + cmath.log(C)) * C * C)


@lru_cache(maxsize=256)
def _quasistatic_roots(eps1, eps2):
    ratio = complex(eps2) / complex(eps1)
    target = 2.0 / ratio
    shift = EULER_GAMMA - math.log(2.0)

    def g(c):
        return (shift + cmath.log(c)) * c * c - target

    def dg(c):
        return 2.0 * c * (shift + cmath.log(c)) + c

    cs = np.linspace(1e-4, 1.1, 2201)
    vals = [g(complex(c)).real for c in cs]
    roots = []
    for i in range(len(cs) - 1):
        if vals[i] == 0 or vals[i] * vals[i + 1] < 0:
            c = complex(brentq(lambda x: g(complex(x)).real, cs[i], cs[i + 1], xtol=1e-15))
            for _ in range(50):
                step = g(c) / dg(c)
                c -= step
                if abs(step) < 1e-16 * abs(c):
                    break
            roots.append(c)
    return tuple(roots)


def quasistatic_constant(eps1=HOST_EPS, eps2=SILVER_EPS):
    """Smallest-modulus root of the small-radius TM0 dispersion relation.

    Solves ``eps2/eps1 = 2 / ((gamma - ln 2 + ln C) C^2)`` for ``C`` with
    ``Re C`` in ``(0, 1.1]``; ``k_par ~ kappa_j ~ C / k0R`` as ``k0R -> 0``.

    Raises
    ------
    ValueError
        If ``Re(eps2/eps1) >= 0``.
    NoRootError
        If no root lies in the search region.
    """
    ratio = complex(eps2) / complex(eps1)
    if not ratio.real < 0:
        raise ValueError("need Re(eps2/eps1) < 0, got %r" % (ratio,))
    roots = _quasistatic_roots(complex(eps1), complex(eps2))
    if not roots:
        raise NoRootError("no quasi-static root with 0 < Re C <= 1.1 for eps2/eps1 = %r" % (ratio,))
    return min(roots, key=abs)


# ---- fundamental mode -------------------------------------------------------


def _solve_m0_at(geom, seed, tol, maxiter):
    f = lambda k: mode_residual_m0(k, geom)
    # both terms of the residual shrink like k0R, so a fixed tolerance would
    # loosen at small radii; tighten it in proportion below k0R = 1
    tol = tol * min(1.0, geom.k0R)
    try:
        res = damped_secant(f, seed, seed * (1 + 1e-3), tol=tol, maxiter=maxiter)
    except ConvergenceError as exc:
        exc.diagnostics.update({"k0R": geom.k0R, "seed": seed})
        raise
    if abs(res.root - seed) > 0.5 * abs(seed):
        raise SeedBasinError(
            "root %r at k0R=%g is far from seed %r" % (res.root, geom.k0R, seed),
            {"k0R": geom.k0R, "seed": seed, "root": res.root},
        )
    return make_mode(0, res.root, geom, res.residual, res.iterations)


def _station(j):
    return DIRECT_SEED_RADIUS * 10.0 ** (j / CONTINUATION_STEPS_PER_DECADE)


@lru_cache(maxsize=1024)
def _ladder_mode(j, eps1, eps2, tol, maxiter):
    # stations of a fixed geometric ladder above DIRECT_SEED_RADIUS; each one
    # is seeded from the station below, so every radius has a unique path
    r = _station(j)
    if j == 0:
        seed = quasistatic_constant(eps1, eps2) / r
    else:
        seed = _ladder_mode(j - 1, eps1, eps2, tol, maxiter).k_par
    return _solve_m0_at(WireGeometry(r, eps1, eps2), seed, tol, maxiter)


@lru_cache(maxsize=4096)
def _solve_fundamental_cached(k0R, eps1, eps2, tol, maxiter):
    if complex(eps2).real >= 0:
        raise ValueError("a bound plasmon needs Re eps2 < 0")
    geom = WireGeometry(k0R, eps1, eps2)
    if k0R <= DIRECT_SEED_RADIUS:
        seed = quasistatic_constant(eps1, eps2) / k0R
    else:
        j = int(math.floor(CONTINUATION_STEPS_PER_DECADE * math.log10(k0R / DIRECT_SEED_RADIUS)))
        while j > 0 and _station(j) >= k0R:
            j -= 1
        seed = _ladder_mode(j, eps1, eps2, tol, maxiter).k_par
    return _solve_m0_at(geom, seed, tol, maxiter)


def solve_fundamental(geom, tol=ROOT_TOL, maxiter=200):
    """Fundamental TM0 plasmon of a conducting wire.

    Radii up to ``DIRECT_SEED_RADIUS`` are seeded at ``C/k0R``. Larger radii
    are reached by continuation along a fixed geometric ladder of radii, so
    the answer for a given radius never depends on what was solved before.

    Parameters
    ----------
    geom : WireGeometry
        Requires ``Re eps2 < 0`` and ``k0R <= MAX_K0R``.
    tol : float
        Residual tolerance on :func:`mode_residual_m0`.

    Returns
    -------
    ModeSolution

    Raises
    ------
    ConvergenceError
        If the damped secant stalls; diagnostics name the radius and seed.
    SeedBasinError
        If the iteration wandered off to a different root.
    """
    if geom.k0R > MAX_K0R:
        raise ValueError("solve_fundamental is limited to k0R <= %g, got %g" % (MAX_K0R, geom.k0R))
    return _solve_fundamental_cached(float(geom.k0R), complex(geom.eps1), complex(geom.eps2), tol, maxiter)


def trace_fundamental(radii, eps1=HOST_EPS, eps2=SILVER_EPS, tol=ROOT_TOL, maxiter=200):
    """:func:`solve_fundamental` over many radii, in input order."""
    return [solve_fundamental(WireGeometry(float(r), eps1, eps2), tol, maxiter) for r in radii]


def propagation_figure(mode):
    """``Re k / Im k``, proportional to the plasmon's propagation length in wavelengths.

    Returns ``math.inf`` for a lossless mode.
    """
    k = mode.k_par
    if k.imag == 0:
        return math.inf
    if k.imag < 0:
        raise ValueError("Im k_par must be non-negative, got %r" % (k,))
    return k.real / k.imag


# ---- scans over real k --------------------------------------------------------


def _scan_grid(geom, kmax, n):
    light = math.sqrt(complex(geom.eps1).real)
    span = kmax - light
    if span <= 0:
        raise ValueError("kmax must exceed the host light line")
    return light + np.logspace(math.log10(span) - 9, math.log10(span), n)


def find_bound_modes(m, geom, kmax=None, n=3000):
    """Guided modes of order ``m`` with real ``k`` between the light line and ``kmax``.

    The scan runs on the lossless companion geometry (``Im eps`` dropped),
    where the residual has constant phase along the real axis; sign changes
    are refined with Brent's method and spurious ones (``|f|`` not small at the
    bracket root) discarded. Lossy geometries are then refined by the complex
    damped secant from each lossless root.

    Returns
    -------
    list of ModeSolution, sorted by decreasing ``Re k_par``
    """
    if kmax is None:
        kmax = 10.0
        if m == 0 and geom.conducting and complex(geom.eps2 / geom.eps1).real < 0:
            try:
                kmax = max(kmax, 3.0 * abs(quasistatic_constant(geom.eps1, geom.eps2)) / geom.k0R)
            except NoRootError:
                pass
    lossless = WireGeometry(geom.k0R, complex(geom.eps1).real, complex(geom.eps2).real)
    ks = _scan_grid(lossless, kmax, n)
    vals = np.array([residual(m, complex(k), lossless) for k in ks])
    ref = vals[np.argmax(np.abs(vals))]
    phase = ref / abs(ref) if abs(ref) > 0 else 1.0
    rotated = (vals / phase).real
    scale = np.max(np.abs(vals))
    found = []
    for i in range(len(ks) - 1):
        a, b = rotated[i], rotated[i + 1]
        if not (np.isfinite(a) and np.isfinite(b)) or a * b > 0:
            continue
        if a == 0:
            root = ks[i]
        else:
            root = brentq(lambda k: (residual(m, complex(k), lossless) / phase).real, ks[i], ks[i + 1], xtol=1e-14)
        if abs(residual(m, complex(root), lossless)) > 1e-6 * scale:
            continue
        found.append(float(root))
    modes = []
    for root in found:
        if lossless == geom:
            modes.append(make_mode(m, complex(root), geom, abs(residual(m, complex(root), geom))))
            continue
        f = lambda k: residual(m, k, geom)
        res = damped_secant(f, complex(root), complex(root) * (1 + 1e-6), tol=ROOT_TOL)
        modes.append(make_mode(m, res.root, geom, res.residual, res.iterations))
    modes.sort(key=lambda md: -md.k_par.real)
    return modes
