"""Spontaneous emission of a radially oriented dipole next to a nanowire.

The quasi-static reflected potential of a point dipole at distance ``d`` from
the surface (radius ``R``, both in units of ``1/k0``) is a sum over azimuthal
orders ``m`` and axial wavenumbers ``h`` weighted by the reflection
coefficients ``alpha_m(h)``. The decay rate into all channels follows from
the imaginary part of the reflected field at the dipole. Three channels are
separated:

* radiative: the induced wire dipole (``m = 1``, ``h -> 0``);
* non-radiative: the near-field ``1/d**3`` absorption;
* plasmon: the pole of ``alpha_0`` in complex ``h``.

Rates are normalised to the emission rate in the uniform host.
"""

import cmath
import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import specfun
from .numerics import damped_secant, golden_section_max
from .wire_modes import quasistatic_constant, solve_fundamental

# Near-field absorption prefactor. The image sum over all azimuthal orders
# converges to 3/8 (the flat-surface value); see README "Model notes".
NONRAD_PREFACTOR = 3.0 / 8.0
# Prefactor as printed in the source formula, kept for comparison.
PRINTED_NONRAD_PREFACTOR = 3.0 / 16.0

CONTOUR_AGREEMENT = 1e-8
DISTANCE_BRACKET_MIN = 1e-4


class ResonanceError(ValueError):
    """``eps2 == -eps1``: flat-surface plasmon resonance, rates diverge."""


class PoleNotFoundError(ArithmeticError):
    pass


class ContourDisagreementError(ArithmeticError):
    pass


class FlatObjectiveError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DipoleEmitter:
    """Point dipole at surface distance ``k0d``; ``orientation`` is a unit 3-vector."""

    k0d: float
    orientation: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if not (self.k0d > 0 and math.isfinite(self.k0d)):
            raise ValueError("k0d must be positive and finite, got %r" % (self.k0d,))
        norm = math.sqrt(sum(c * c for c in self.orientation))
        if abs(norm - 1.0) > 1e-9:
            raise ValueError("orientation must be a unit vector, norm is %r" % norm)

    @classmethod
    def radial(cls, k0d):
        return cls(k0d, (1.0, 0.0, 0.0))

    @classmethod
    def axial(cls, k0d):
        return cls(k0d, (0.0, 0.0, 1.0))


@dataclass(frozen=True)
class DecayRates:
    rad: float
    nonrad: float
    pl: float

    def __post_init__(self):
        for name in ("rad", "nonrad", "pl"):
            if not getattr(self, name) >= 0:
                raise ValueError("%s rate must be non-negative, got %r" % (name, getattr(self, name)))

    @property
    def total(self):
        return self.rad + self.nonrad + self.pl

    @property
    def non_plasmon(self):
        return self.rad + self.nonrad

    @property
    def branching(self):
        t = self.total
        return self.pl / t if t > 0 else 0.0

    @property
    def error(self):
        return 1.0 - self.branching

    @property
    def purcell(self):
        np_ = self.non_plasmon
        return self.pl / np_ if np_ > 0 else math.inf


@dataclass(frozen=True)
class PlasmonCouplingConstant:
    """Material constant of the plasmon rate and the pole it came from.

    ``alpha_pl`` multiplies ``|K1(kappa1 (R + d))|**2 / R**3``. ``residue`` is the
    residue of ``alpha_0`` in the variable ``x = h R`` at ``pole = x_p``.
    """

    alpha_pl: float
    residue: complex
    pole: complex
    eps1: complex
    eps2: complex
    contour_radii: tuple = ()

    @property
    def quasistatic_kappa(self):
        """``x_p``; the quasi-static ``kappa_1 R`` of the fundamental mode."""
        return self.pole


def _fresnel(eps1, eps2):
    if eps2 == -eps1:
        raise ResonanceError("eps2 = -eps1 is the flat-surface plasmon resonance")
    return (eps2 - eps1) / (eps2 + eps1)


def _radial(emitter):
    if abs(abs(emitter.orientation[0]) - 1.0) > 1e-12:
        raise ValueError("wire rates are defined for a radially oriented dipole")


# ---- reflection coefficients -------------------------------------------------


def alpha_m_scaled(m, x, eps1, eps2):
    """``exp(-2x) alpha_m`` at ``x = h R`` (complex ``x`` allowed)."""
    si = specfun.bessel_i_seq_scaled(m + 1, x)
    sk = specfun.bessel_k_seq_scaled(m + 1, x)
    i_m = si[m]
    i_p = 0.5 * ((si[1] if m == 0 else si[m - 1]) + si[m + 1])
    k_m = sk[m]
    k_p = -0.5 * ((sk[1] if m == 0 else sk[m - 1]) + sk[m + 1])
    # unscaled I = ive e^{x}, K = kve e^{-x} for Re x >= 0; phases cancel in the ratio
    num = (eps2 - eps1) / eps1 * i_p * i_m
    den = eps1 * i_m * k_p - eps2 * k_m * i_p
    if complex(x).real < 0:
        raise ValueError("alpha_m_scaled expects Re x >= 0")
    return num / den * cmath.exp(-1j * complex(x).imag)


def alpha_m(m, h, geom):
    """Reflection coefficient of azimuthal order ``m`` at axial wavenumber ``h``.

    ``alpha_m = (eps2 - eps1) I_m'(hR) I_m(hR)
    / (eps1 [eps1 I_m(hR) K_m'(hR) - eps2 K_m(hR) I_m'(hR)])``.

    Parameters
    ----------
    m : int
    h : float or complex
        Axial wavenumber in units of ``k0``; ``Re h > 0``.
    geom : WireGeometry

    Returns
    -------
    complex
    """
    x = complex(h) * geom.k0R
    if not x.real > 0:
        raise ValueError("alpha_m needs Re h > 0")
    return alpha_m_scaled(m, x, geom.eps1, geom.eps2) * cmath.exp(2.0 * x)


def _pole_function(x, eps1, eps2):
    # denominator of alpha_0 divided by I0 K0: -eps1 K1/K0 - eps2 I1/I0
    si = specfun.bessel_i_seq_scaled(1, x)
    sk = specfun.bessel_k_seq_scaled(1, x)
    return -eps1 * sk[1] / sk[0] - eps2 * si[1] / si[0]


def _contour_residue(func, center, radius, n):
    t = 2.0 * math.pi * np.arange(n) / n
    pts = center + radius * np.exp(1j * t)
    vals = np.array([func(complex(p)) for p in pts])
    # (1/2 pi i) \oint f dz with dz = i r e^{it} dt
    return complex(np.mean(vals * radius * np.exp(1j * t)))


def _adaptive_residue(func, center, radius):
    n = 16
    prev = _contour_residue(func, center, radius, n)
    while n < 4096:
        n *= 2
        cur = _contour_residue(func, center, radius, n)
        if abs(cur - prev) <= 1e-14 * abs(cur):
            return cur
        prev = cur
    return prev


_residue_cache = {}
_residue_lock = threading.Lock()


def _pole_and_residue(eps1, eps2):
    key = (complex(eps1), complex(eps2))
    with _residue_lock:
        hit = _residue_cache.get(key)
    if hit is not None:
        return hit
    C = quasistatic_constant(eps1, eps2)
    try:
        res = damped_secant(lambda x: _pole_function(x, eps1, eps2), C, C * 1.01, tol=1e-13)
    except ArithmeticError as exc:
        raise PoleNotFoundError("alpha_0 pole not found near x = %r" % (C,)) from exc
    xp = res.root
    alpha0 = lambda x: alpha_m_scaled(0, x, eps1, eps2) * cmath.exp(2.0 * x)
    radii = (0.1 * abs(xp), 0.05 * abs(xp))
    residues = [_adaptive_residue(alpha0, xp, r) for r in radii]
    if abs(residues[0] - residues[1]) > CONTOUR_AGREEMENT * abs(residues[0]):
        raise ContourDisagreementError(
            "contour residues disagree: %r vs %r" % (residues[0], residues[1])
        )
    out = (xp, residues[1], radii)
    with _residue_lock:
        _residue_cache[key] = out
    return out


def extract_plasmon_residue(geom):
    """Locate the pole of ``alpha_0`` and turn its residue into ``alpha_pl``.

    The pole ``h_p`` of ``alpha_0(h)`` continued off the real axis is found by
    a damped secant seeded at the quasi-static constant. Its residue comes
    from trapezoidal contour integrals on circles of two radii around ``h_p``,
    which must agree to 1e-8. The pole contribution to the radial-dipole rate
    is then ``-(3/sqrt(eps1)) Re(Res_x x_p^2 K1(x_p (R+d)/R)^2) / R^3`` in terms
    of ``x = h R``, so ``alpha_pl = -(3/sqrt(eps1)) Re(Res_x x_p^2)``.

    Results are memoised per ``(eps1, eps2)``; the memo is lock-protected.

    Returns
    -------
    PlasmonCouplingConstant
    """
    eps1, eps2 = complex(geom.eps1), complex(geom.eps2)
    xp, res_x, radii = _pole_and_residue(eps1, eps2)
    # expressed through the h-plane at this radius, then mapped back
    R = geom.k0R
    h_p = xp / R
    res_h = res_x / R
    alpha_pl = -(3.0 / cmath.sqrt(eps1)) * (res_h * h_p * h_p) * R**3
    return PlasmonCouplingConstant(
        alpha_pl=float(alpha_pl.real),
        residue=res_x,
        pole=xp,
        eps1=eps1,
        eps2=eps2,
        contour_radii=radii,
    )


def plasmon_pole(geom):
    """Complex axial wavenumber ``h_p`` of the ``alpha_0`` pole at this radius."""
    return _pole_and_residue(complex(geom.eps1), complex(geom.eps2))[0] / geom.k0R


# ---- rates ----------------------------------------------------------------------


def wire_rate_rad(emitter, geom):
    """Radiative rate ``|1 + (eps2-eps1)/(eps2+eps1) R^2/(R+d)^2|^2``."""
    _radial(emitter)
    R, d = geom.k0R, emitter.k0d
    rho = _fresnel(geom.eps1, geom.eps2)
    return abs(1.0 + rho * R * R / ((R + d) * (R + d))) ** 2


def wire_rate_nonrad(emitter, geom, prefactor=NONRAD_PREFACTOR):
    """Near-field absorption rate ``c Im[(eps2-eps1)/(eps2+eps1)] / (eps1^{3/2} d^3)``.

    ``c`` defaults to :data:`NONRAD_PREFACTOR`; pass
    :data:`PRINTED_NONRAD_PREFACTOR` for the half-size printed coefficient.
    """
    _radial(emitter)
    rho = _fresnel(geom.eps1, geom.eps2)
    e1 = complex(geom.eps1).real
    return prefactor * rho.imag / (e1**1.5 * emitter.k0d**3)


def wire_rate_plasmon(emitter, geom, cpl=None, mode=None, kappa1=None):
    """Plasmon rate ``alpha_pl |K1(kappa1 (R+d))|^2 / R^3``.

    ``kappa1`` is taken from ``mode`` (default: the full fundamental-mode
    solution) unless given explicitly; passing ``plasmon_pole(geom)`` gives
    the purely quasi-static rate.
    """
    _radial(emitter)
    if cpl is None:
        cpl = extract_plasmon_residue(geom)
    if kappa1 is None:
        if mode is None:
            mode = solve_fundamental(geom)
        kappa1 = mode.kappa1
    z = complex(kappa1) * (geom.k0R + emitter.k0d)
    k1 = specfun.bessel_k_scaled(1, z)
    # |K1|^2 = |kve|^2 e^{-2 Re z}; underflow to zero is the correct limit
    mag2 = abs(k1) ** 2 * math.exp(-2.0 * z.real) if z.real < 700 else 0.0
    return cpl.alpha_pl * mag2 / geom.k0R**3


def wire_rates(emitter, geom, cpl=None, mode=None, nonrad_prefactor=NONRAD_PREFACTOR):
    return DecayRates(
        rad=wire_rate_rad(emitter, geom),
        nonrad=wire_rate_nonrad(emitter, geom, nonrad_prefactor),
        pl=wire_rate_plasmon(emitter, geom, cpl, mode),
    )


def optimal_distance(geom, mode=None, cpl=None, rtol=1e-6, nonrad_prefactor=NONRAD_PREFACTOR):
    """Emitter distance that maximises the plasmon branching ratio.

    A 60-point logarithmic scan over ``k0d`` in ``[1e-4, 10 k0R]`` brackets
    the maximum, which golden-section search then refines in ``log d`` to
    relative tolerance ``rtol``.

    Returns
    -------
    (float, DecayRates)

    Raises
    ------
    FlatObjectiveError
        If the branching ratio varies by less than 1e-12 over the bracket.
    """
    if cpl is None:
        cpl = extract_plasmon_residue(geom)
    if mode is None:
        mode = solve_fundamental(geom)
    lo = math.log(DISTANCE_BRACKET_MIN)
    hi = math.log(10.0 * geom.k0R)
    if hi <= lo:
        raise ValueError("k0R too small for the distance bracket")

    def beta(logd):
        return wire_rates(DipoleEmitter.radial(math.exp(logd)), geom, cpl, mode, nonrad_prefactor).branching

    grid = np.linspace(lo, hi, 60)
    vals = [beta(x) for x in grid]
    if max(vals) - min(vals) < 1e-12:
        raise FlatObjectiveError("branching ratio is flat over the distance bracket")
    i = int(np.argmax(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, len(grid) - 1)]
    logd, _ = golden_section_max(beta, a, b, rtol=rtol / max(abs(a), abs(b)))
    d = math.exp(logd)
    return d, wire_rates(DipoleEmitter.radial(d), geom, cpl, mode, nonrad_prefactor)


@dataclass(frozen=True)
class ErrorPoint:
    k0R: float
    error: float
    k0d: float
    rates: DecayRates


def wire_error_curve(geoms, nonrad_prefactor=NONRAD_PREFACTOR):
    """Optimised non-plasmon error ``min_d (1 - beta)`` for each geometry."""
    geoms = list(geoms)
    if not geoms:
        raise ValueError("wire_error_curve needs at least one geometry")
    out = []
    for g in geoms:
        d, rates = optimal_distance(g, nonrad_prefactor=nonrad_prefactor)
        out.append(ErrorPoint(g.k0R, rates.error, d, rates))
    return out


# ---- series and contour diagnostics --------------------------------------------


def _debye_log_terms(m, x, y, eps1, eps2):
    """Uniform large-order approximation of ``alpha_m(x) K_m'(y)^2`` (real ``x < y``)."""

    def eta(t):
        s = np.sqrt(1.0 + t * t)
        return s + np.log(t / (1.0 + s)), s

    t = x / m
    et, s = eta(t)
    p = 1.0 / s
    u1 = (3 * p - 5 * p**3) / 24.0
    v1 = (-9 * p + 7 * p**3) / 24.0
    base = -0.5 * np.log(2 * np.pi * m)
    l_i = m * et + base - 0.25 * np.log(1 + t * t) + np.log1p(u1 / m)
    l_ip = m * et + base + 0.25 * np.log(1 + t * t) - np.log(t) + np.log1p(v1 / m)
    kb = 0.5 * np.log(np.pi / (2 * m))
    l_k = -m * et + kb - 0.25 * np.log(1 + t * t) + np.log1p(-u1 / m)
    l_kp = -m * et + kb + 0.25 * np.log(1 + t * t) - np.log(t) + np.log1p(-v1 / m)
    ty = y / m
    ety, sy = eta(ty)
    v1y = (-9 / sy + 7 / sy**3) / 24.0
    l_kpy = -m * ety + kb + 0.25 * np.log(1 + ty * ty) - np.log(ty) + np.log1p(-v1y / m)
    r_i = np.exp(l_ip - l_i)
    r_k = -np.exp(l_kp - l_k)
    pref = (eps2 - eps1) / eps1 * r_i / (eps1 * r_k - eps2 * r_i)
    return pref * np.exp(l_i - l_k + 2 * l_kpy)


def _exact_terms(mmax, x, y, eps1, eps2):
    """``alpha_m(x) K_m'(y)^2`` for ``m = 0..mmax`` (rows: h points, real ``x < y``).

    Grouped as ``[I'K'][I K'] / den * (K'(y)/K'(x))^2`` so that every factor
    stays bounded even where ``K_m(y)^2`` alone would overflow.
    """
    si = specfun.bessel_i_seq_scaled_array(mmax + 1, x)
    sk = specfun.bessel_k_seq_scaled_array(mmax + 1, x)
    sky = specfun.bessel_k_seq_scaled_array(mmax + 1, y)
    lower = lambda s: np.concatenate([s[:, 1:2], s[:, :mmax]], axis=1)
    i_m, k_m = si[:, : mmax + 1], sk[:, : mmax + 1]
    i_p = 0.5 * (lower(si) + si[:, 1 : mmax + 2])
    k_p = -0.5 * (lower(sk) + sk[:, 1 : mmax + 2])
    ky_p = -0.5 * (lower(sky) + sky[:, 1 : mmax + 2])
    with np.errstate(all="ignore"):
        den = eps1 * i_m * k_p - eps2 * k_m * i_p
        core = (eps2 - eps1) / eps1 * (i_p * k_p) * (i_m * k_p) / den
        ratio = ky_p / k_p
        out = core * ratio * ratio * np.exp(-2.0 * (y - x))[:, None]
    return np.where(np.isfinite(out), out, 0.0)


def reflected_field_rate(emitter, geom, n_h=8000, m_switch=40, m_max=20000, rtol=1e-10):
    """Total reflected-field decay rate from the azimuthal-order series.

    Evaluates ``-(3/(pi sqrt(eps1))) Im sum_m (2 - delta_m0) int h^2 alpha_m(h)
    K_m'(h (R+d))^2 dh`` on a logarithmic ``h`` grid by the trapezoidal rule.
    Orders below ``m_switch`` use exact Bessel functions; higher orders use
    the uniform large-order expansion. This includes every channel, and
    near the surface it is dominated by the ``1/d^3`` absorption term.
    """
    _radial(emitter)
    eps1, eps2 = complex(geom.eps1), complex(geom.eps2)
    R, d = geom.k0R, emitter.k0d
    rp = R + d
    h = np.exp(np.linspace(math.log(1e-3 / rp), math.log(80.0 / d), n_h))
    x, y = h * R, h * rp
    logh = np.log(h)
    exact = _exact_terms(m_switch - 1, x, y, eps1, eps2)
    weights = np.full(m_switch, 2.0)
    weights[0] = 1.0
    S = np.sum(weights * integrate.trapezoid(exact * (h**3)[:, None], logh, axis=0))
    for m in range(m_switch, m_max):
        with np.errstate(all="ignore"):
            g = _debye_log_terms(m, x, y, eps1, eps2) * h**3
        g = np.where(np.isfinite(g), g, 0.0)
        term = 2.0 * integrate.trapezoid(g, logh)
        S += term
        if abs(term.imag) < rtol * abs(S.imag):
            break
    return float(-(3.0 / (math.pi * math.sqrt(eps1.real))) * S.imag)


def _pole_integrand(h, geom, rp):
    x = h * geom.k0R
    k1 = specfun.bessel_k_scaled(1, h * rp)
    return h * h * alpha_m_scaled(0, x, geom.eps1, geom.eps2) * k1 * k1 * cmath.exp(-2.0 * (h * rp - x))


def contour_pole_rate(emitter, geom):
    """Plasmon rate from direct numerical ``h`` integration of the ``m = 0`` term.

    The ``m = 0`` integrand is integrated once along the real axis and once
    along a path lifted above the pole. Their difference is ``2 pi i`` times the
    pole residue, and half of it is the pole's share of the real-axis
    integral. No residue formula is used; this checks the closed-form plasmon
    rate independently.
    """
    _radial(emitter)
    rp = geom.k0R + emitter.k0d
    hp = plasmon_pole(geom)
    f = lambda h: _pole_integrand(complex(h), geom, rp)
    a, b = 0.5 * hp.real, 1.5 * hp.real
    lift = 0.3 * hp.real
    opts = dict(limit=400, epsabs=0.0, epsrel=1e-11, complex_func=True)
    # real-axis segment through the pole region
    on_axis = integrate.quad(lambda t: f(t), a, b, points=[hp.real], **opts)[0]
    # lifted path a -> a + i lift -> b + i lift -> b
    up = integrate.quad(lambda s: f(a + 1j * s) * 1j, 0.0, lift, **opts)[0]
    across = integrate.quad(lambda t: f(t + 1j * lift), a, b, **opts)[0]
    # forward limits only: quad's complex mode mishandles reversed ones
    down = -integrate.quad(lambda s: f(b + 1j * s) * 1j, 0.0, lift, **opts)[0]
    lifted = up + across + down
    pole_part = 0.5 * (on_axis - lifted)
    return float(-(3.0 / (math.pi * math.sqrt(complex(geom.eps1).real))) * pole_part.imag)
