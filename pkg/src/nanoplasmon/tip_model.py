"""Emitter on the axis of a paraboloidal metal tip.

The tip surface is ``rho(z) = sqrt(v z)``; an axially oriented dipole sits
on the axis a distance ``d`` in front of the apex. Closed-form quasi-static
rates give the three channels. A plasmon launched at the apex then travels
up the taper to a final radius ``R``, where the tip becomes a uniform wire.
Its loss on the way is estimated in the eikonal approximation, with the
local wavevector taken from the wire solution at the local radius.

All lengths are in units of ``1/k0``.
"""

import math
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import CubicSpline

from . import specfun
from .emitter_coupling import DecayRates, ResonanceError
from .materials import HOST_EPS, SILVER_EPS
from .numerics import golden_section_max
from .wire_modes import WireGeometry, quasistatic_constant, solve_fundamental

TIP_PURCELL_TARGET = 2.5e3
TIP_NONRAD_PREFACTOR = 3.0 / 8.0
MEMO_POINTS_PER_DECADE = 40
MEMO_RHO_MIN = 1e-4
MEMO_RHO_MAX = 3.0


class OptimizerWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class TipGeometry:
    k0v: float
    k0R_final: float = 0.0

    def __post_init__(self):
        if not (self.k0v > 0 and math.isfinite(self.k0v)):
            raise ValueError("k0v must be positive, got %r" % (self.k0v,))
        if not (self.k0R_final >= 0 and math.isfinite(self.k0R_final)):
            raise ValueError("k0R_final must be non-negative, got %r" % (self.k0R_final,))

    @property
    def z_final(self):
        """Axial length ``R^2 / v`` of the paraboloidal section."""
        return self.k0R_final**2 / self.k0v


@dataclass(frozen=True)
class TipCouplingConstant:
    alpha_pl_tip: float
    eps1: complex
    eps2: complex
    C: complex
    calibration_source: dict = field(default_factory=dict, compare=False, hash=False)


def _fresnel(eps1, eps2):
    if eps2 == -eps1:
        raise ResonanceError("eps2 = -eps1 is the flat-surface plasmon resonance")
    return (eps2 - eps1) / (eps2 + eps1)


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise ValueError("%s must be positive and finite, got %r" % (name, value))


def tip_rate_rad(k0d, k0v, eps1=HOST_EPS, eps2=SILVER_EPS):
    """Radiative rate ``|1 + (eps2/eps1 - 1) / (1 + 4d/v)|^2``."""
    _positive("k0d", k0d)
    _positive("k0v", k0v)
    return abs(1.0 + (eps2 / eps1 - 1.0) / (1.0 + 4.0 * k0d / k0v)) ** 2


def tip_rate_nonrad(k0d, eps1=HOST_EPS, eps2=SILVER_EPS):
    """Near-field absorption ``(3/8) Im[(eps2-eps1)/(eps2+eps1)] / (eps1^{3/2} d^3)``."""
    _positive("k0d", k0d)
    rho = _fresnel(eps1, eps2)
    return TIP_NONRAD_PREFACTOR * rho.imag / (complex(eps1).real ** 1.5 * k0d**3)


def _k1_mod2(z):
    if z.real > 700:
        return 0.0
    return abs(specfun.bessel_k_scaled(1, z)) ** 2 * math.exp(-2.0 * z.real)


def _plasmon_shape(u, C):
    """``|K1(C sqrt(1+4u))|^2 / (1+4u)`` with ``u = d/v``."""
    s = 1.0 + 4.0 * u
    return _k1_mod2(C * math.sqrt(s)) / s


def tip_rate_plasmon(k0d, k0v, cpl, C=None):
    """Plasmon rate ``alpha'_pl |K1(C sqrt(1+4d/v))|^2 / (v^3 (1+4d/v))``."""
    _positive("k0d", k0d)
    _positive("k0v", k0v)
    if C is None:
        C = cpl.C
    return cpl.alpha_pl_tip * _plasmon_shape(k0d / k0v, complex(C)) / k0v**3


def tip_rates(k0d, k0v, cpl):
    return DecayRates(
        rad=tip_rate_rad(k0d, k0v, cpl.eps1, cpl.eps2),
        nonrad=tip_rate_nonrad(k0d, cpl.eps1, cpl.eps2),
        pl=tip_rate_plasmon(k0d, k0v, cpl),
    )


def _limit_purcell_shape(u, eps1, eps2, C):
    # v -> 0 at fixed u = d/v: the radiative rate drops out and the ratio
    # pl/nonrad loses all v dependence
    rho = _fresnel(eps1, eps2)
    nonrad_shape = TIP_NONRAD_PREFACTOR * rho.imag / (complex(eps1).real ** 1.5 * u**3)
    return _plasmon_shape(u, C) / nonrad_shape


_calibration_cache = {}
_calibration_lock = threading.Lock()


def calibrate_tip_coupling(eps1=HOST_EPS, eps2=SILVER_EPS, target_purcell=TIP_PURCELL_TARGET):
    """Fix ``alpha'_pl`` so the (d, v)-optimised Purcell factor equals ``target_purcell``.

    As ``v -> 0`` at fixed ``u = d/v`` the Purcell factor tends to
    ``alpha'_pl * S(u)`` with a shape function ``S`` that depends only on the
    materials. The supremum over ``(d, v)`` is therefore ``alpha'_pl max_u S``,
    and ``alpha'_pl = target / max_u S``. The calibration record is attached.

    Returns
    -------
    TipCouplingConstant
    """
    eps1, eps2 = complex(eps1), complex(eps2)
    key = (eps1, eps2, float(target_purcell))
    with _calibration_lock:
        hit = _calibration_cache.get(key)
    if hit is not None:
        return hit
    C = quasistatic_constant(eps1, eps2)
    f = lambda lu: _limit_purcell_shape(math.exp(lu), eps1, eps2, C)
    grid = np.linspace(math.log(1e-2), math.log(1e3), 200)
    vals = [f(x) for x in grid]
    i = int(np.argmax(vals))
    lu, smax = golden_section_max(f, grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)], rtol=1e-12)
    alpha = target_purcell / smax
    record = {
        "method": "v->0 limit of max over d/v of the plasmon/non-plasmon ratio",
        "target_purcell": float(target_purcell),
        "optimal_d_over_v": math.exp(lu),
        "alpha_pl_tip": alpha,
        "eps1": [eps1.real, eps1.imag],
        "eps2": [eps2.real, eps2.imag],
    }
    out = TipCouplingConstant(alpha, eps1, eps2, C, record)
    with _calibration_lock:
        _calibration_cache[key] = out
    return out


# ---- dispersion memo and eikonal propagation ----------------------------------


class DispersionMemo:
    """Cached ``Im k_par(rho)`` of the fundamental wire mode.

    The full solver is sampled on a logarithmic grid (40 points per decade
    by default) between ``rho_min`` and ``rho_max``. The smooth product
    ``rho Im k`` is interpolated with a cubic spline in ``log rho``. Below
    ``rho_min`` the small-radius law ``Im k ~ c / rho`` extends it. The grid
    is built lazily, once, under a lock.
    """

    def __init__(self, eps1=HOST_EPS, eps2=SILVER_EPS, points_per_decade=MEMO_POINTS_PER_DECADE,
                 rho_min=MEMO_RHO_MIN, rho_max=MEMO_RHO_MAX):
        self.eps1 = complex(eps1)
        self.eps2 = complex(eps2)
        self.points_per_decade = int(points_per_decade)
        self.rho_min = float(rho_min)
        self.rho_max = float(rho_max)
        self._lock = threading.Lock()
        self._spline = None
        self._edge = None

    def _build(self):
        decades = math.log10(self.rho_max / self.rho_min)
        n = int(round(decades * self.points_per_decade)) + 1
        rhos = np.logspace(math.log10(self.rho_min), math.log10(self.rho_max), n)
        g = np.array(
            [r * solve_fundamental(WireGeometry(float(r), self.eps1, self.eps2)).k_par.imag for r in rhos]
        )
        return CubicSpline(np.log(rhos), g), float(g[0])

    def _ensure(self):
        if self._spline is None:
            with self._lock:
                if self._spline is None:
                    spline, edge = self._build()
                    self._edge = edge
                    self._spline = spline
        return self._spline

    def rho_im_k(self, rho):
        """``rho * Im k_par(rho)``; finite as ``rho -> 0``."""
        spline = self._ensure()
        if rho <= 0:
            return self._edge
        if rho < self.rho_min:
            return self._edge
        if rho > self.rho_max:
            raise ValueError("rho=%g beyond memo range %g" % (rho, self.rho_max))
        return float(spline(math.log(rho)))

    def __call__(self, rho):
        if rho <= 0:
            raise ValueError("Im k diverges at rho = 0")
        return self.rho_im_k(rho) / rho


_memos = {}
_memo_lock = threading.Lock()


def dispersion_memo(eps1=HOST_EPS, eps2=SILVER_EPS):
    """Shared :class:`DispersionMemo` for a material pair."""
    key = (complex(eps1), complex(eps2))
    with _memo_lock:
        memo = _memos.get(key)
        if memo is None:
            memo = _memos[key] = DispersionMemo(*key)
    return memo


def _rho_weighted(dispersion):
    if hasattr(dispersion, "rho_im_k"):
        return dispersion.rho_im_k
    return lambda rho: rho * dispersion(rho) if rho > 0 else 0.0


def propagation_integral(k0R_final, dispersion, nodes=None, rtol=1e-8):
    """``int_0^R rho Im k(rho) d rho``.

    This is the loss integral after the substitution ``z = rho^2 / v``, which
    turns the ``1/sqrt(z)`` apex singularity of the axial integral into a
    bounded integrand. It does not depend on ``v``. With ``nodes`` an
    ``n``-point Gauss-Legendre rule is used; otherwise adaptive quadrature
    to relative tolerance ``rtol``.
    """
    if k0R_final == 0:
        return 0.0
    g = _rho_weighted(dispersion)
    if nodes is not None:
        x, w = np.polynomial.legendre.leggauss(int(nodes))
        r = 0.5 * k0R_final * (x + 1.0)
        return 0.5 * k0R_final * float(sum(wi * g(float(ri)) for ri, wi in zip(r, w)))
    val, err = integrate.quad(g, 0.0, k0R_final, epsabs=0.0, epsrel=rtol, limit=200)
    if not err <= max(10 * rtol * abs(val), 1e-300):
        raise ArithmeticError("eikonal quadrature did not converge (err %.2e)" % err)
    return val


def eikonal_attenuation(tip, dispersion, nodes=None, rtol=1e-8):
    """Surviving plasmon power after propagating from the apex to ``R_final``.

    ``exp(-2 int_0^{z(R)} Im k(rho(z)) dz) = exp(-(4/v) int_0^R rho Im k d rho)``.

    Parameters
    ----------
    tip : TipGeometry
    dispersion : callable
        ``rho -> Im k_par`` of the wire of radius ``rho``; a
        :class:`DispersionMemo` is the usual choice.
    nodes : int, optional
        Fixed Gauss-Legendre order instead of adaptive quadrature.

    Returns
    -------
    float in ``(0, 1]``
    """
    J = propagation_integral(tip.k0R_final, dispersion, nodes, rtol)
    return math.exp(-4.0 * J / tip.k0v)


# ---- optimisation ------------------------------------------------------------------


@dataclass(frozen=True)
class TipOptimum:
    P_E: float
    k0d: float
    k0v: float
    rates: DecayRates
    attenuation: float
    converged: bool


def _tip_error(logd, logv, cpl, J):
    d, v = math.exp(logd), math.exp(logv)
    r = tip_rates(d, v, cpl)
    att = math.exp(-4.0 * J / v)
    return 1.0 - r.pl * att / r.total


def tip_error_probability(k0R_final, eps1=HOST_EPS, eps2=SILVER_EPS, cpl=None, dispersion=None, seeds=8):
    """Non-plasmon error of a tip with propagation loss, optimised over (d, v).

    Minimises ``1 - Gamma_pl A(v) / (Gamma' + Gamma_pl)``, where ``A`` is the
    eikonal attenuation up to ``k0R_final``. The search is Nelder-Mead in
    ``(log d, log v)``, restarted from ``seeds`` points with log-spaced ``v``
    and ``d = 10 v``.

    Returns
    -------
    TipOptimum
        ``converged`` is False (and an :class:`OptimizerWarning` issued) if
        no restart reported convergence; the best point found is still
        returned.
    """
    _positive("k0R_final", k0R_final)
    if cpl is None:
        cpl = calibrate_tip_coupling(eps1, eps2)
    if dispersion is None:
        dispersion = dispersion_memo(eps1, eps2)
    J = propagation_integral(k0R_final, dispersion)
    obj = lambda p: _tip_error(p[0], p[1], cpl, J)
    best = None
    any_ok = False
    for v0 in np.logspace(-4, 0, seeds):
        x0 = [math.log(10.0 * v0), math.log(v0)]
        res = optimize.minimize(obj, x0, method="Nelder-Mead",
                                options={"xatol": 1e-9, "fatol": 1e-14, "maxiter": 4000})
        any_ok = any_ok or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    if not any_ok:
        warnings.warn("tip optimiser did not converge at k0R=%g" % k0R_final, OptimizerWarning)
    d, v = math.exp(best.x[0]), math.exp(best.x[1])
    return TipOptimum(
        P_E=float(best.fun),
        k0d=d,
        k0v=v,
        rates=tip_rates(d, v, cpl),
        attenuation=math.exp(-4.0 * J / v),
        converged=any_ok,
    )


def tip_error_vs_v(k0v_values, eps1=HOST_EPS, eps2=SILVER_EPS, cpl=None):
    """Pre-propagation error ``min_d (1 - beta)`` for each curvature ``v``.

    Returns a list of ``(k0v, error, k0d)`` tuples.
    """
    if cpl is None:
        cpl = calibrate_tip_coupling(eps1, eps2)
    out = []
    for v in k0v_values:
        _positive("k0v", v)
        f = lambda lu: tip_rates(math.exp(lu) * v, v, cpl).branching
        grid = np.linspace(math.log(1e-2), math.log(1e3), 120)
        vals = [f(x) for x in grid]
        i = int(np.argmax(vals))
        lu, b = golden_section_max(f, grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)], rtol=1e-10)
        out.append((float(v), 1.0 - b, math.exp(lu) * v))
    return out
