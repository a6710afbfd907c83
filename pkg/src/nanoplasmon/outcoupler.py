"""Transfer of the wire plasmon into a dielectric fiber, and end-to-end efficiency.

A step-index fiber (core ``eps_core``, cladding equal to the host ``eps1``)
runs parallel to the wire. Its fundamental HE11 mode is solved exactly and
phase matched to the plasmon by choosing the core radius. Power then moves
from plasmon to fiber according to two-mode codirectional coupled-mode
equations with loss on the plasmon only. The coupling constant is the
reciprocity overlap of the two power-normalised mode fields over the fiber
core.

Conventions: fields vary as ``exp(i(k z - omega t))``, ``k0 = 1``, and the
magnetic field is scaled by the vacuum impedance so that
``curl E = i H`` and ``curl H = -i eps E``.
"""

import cmath
import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from . import specfun
from .emitter_coupling import optimal_distance
from .materials import CORE_EPS, HOST_EPS, SILVER_EPS
from .numerics import golden_section_max
from .tip_model import calibrate_tip_coupling, dispersion_memo, tip_error_probability
from .wire_modes import WireGeometry, solve_fundamental

J0_FIRST_ZERO = 2.404825557695773
DEFAULT_MIN_GAP = 0.05
KAPPA_RTOL = 1e-6


class UnmatchableError(ValueError):
    """No fiber radius reaches the plasmon's phase velocity."""

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class MultimodeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class FiberGeometry:
    k0a: float
    eps_core: float = CORE_EPS
    eps_clad: float = HOST_EPS

    def __post_init__(self):
        if not (self.k0a > 0 and math.isfinite(self.k0a)):
            raise ValueError("k0a must be positive, got %r" % (self.k0a,))
        if not (self.eps_core > self.eps_clad > 0):
            raise ValueError("need eps_core > eps_clad > 0")

    @property
    def V(self):
        return self.k0a * math.sqrt(self.eps_core - self.eps_clad)

    @property
    def single_mode(self):
        return self.V < J0_FIRST_ZERO

    def with_radius(self, k0a):
        return FiberGeometry(k0a, self.eps_core, self.eps_clad)


@dataclass(frozen=True)
class FiberMode:
    """HE11 mode. ``u``, ``w`` are the core and cladding parameters.

    Field amplitudes: ``E_z = A J1(u r/a) cos(phi)`` and
    ``H_z = B J1(u r/a) sin(phi)`` in the core, with ``A = 1`` and
    ``B = amplitude_ratio``.
    """

    fiber: FiberGeometry
    k_par: float
    u: float
    w: float
    amplitude_ratio: float
    residual: float
    power: float = field(default=float("nan"))


# ---- HE11 solver ----------------------------------------------------------------


def _k_ratio(w):
    # K0(w) / (w K1(w))
    s = specfun.bessel_k_seq_scaled(1, w)
    return (s[0] / (w * s[1])).real


def he11_characteristic(w, fiber):
    """HE11 dispersion function in terms of the cladding parameter ``w``.

    The textbook form ``J0/(u J1) = -(ec+el)/(2 ec) Y + 1/u^2 - R`` has
    ``R`` and ``Y`` each of order ``1/w^2``. They cancel to leading order
    for weak guidance. Here the difference is carried analytically, using
    ``Y + Q = 1/u^2 - K0/(w K1)``, so the function stays accurate down to
    ``w -> 0``. Positive for small ``u`` (``w -> V``), tends to ``-inf`` as
    ``w -> 0``.
    """
    a, ec, el = fiber.k0a, fiber.eps_core, fiber.eps_clad
    V = fiber.V
    u = math.sqrt(max(V * V - w * w, 0.0))
    beta2 = el + (w / a) ** 2
    kr = _k_ratio(w)
    jr = specfun.bessel_j(0, u).real / (u * specfun.bessel_j(1, u).real)
    w2u2 = (w / u) ** 2
    y_t = -w * w * kr - 1.0  # w^2 Y
    q_t = w2u2 + 1.0  # w^2 Q
    m_t = w2u2 + 2.0 + w * w * kr  # w^2 (Q - Y)
    P = 1.0 / (u * u) - kr  # Q + Y
    s_plus = (ec + el) / (2.0 * ec)
    s_minus = (ec - el) / (2.0 * ec)
    r_t = math.sqrt((s_minus * y_t) ** 2 + beta2 * q_t * q_t / ec)
    a_t = s_plus * y_t
    a_plus_r = (el * P * m_t + q_t * q_t / (a * a)) / (ec * (r_t - a_t))
    return jr - 1.0 / (u * u) + a_plus_r


def _fiber_fields_amplitude(fiber, u, w, beta):
    X = specfun.bessel_j_prime(1, u).real / (u * specfun.bessel_j(1, u).real)
    s = specfun.bessel_k_seq_scaled(2, w)
    Y = (-0.5 * (s[0] + s[2]) / s[1]).real / w
    Q = 1.0 / (u * u) + 1.0 / (w * w)
    return -beta * Q / (X + Y)


def solve_fiber_he11(fiber):
    """Propagation constant and field parameters of the HE11 mode.

    The root is bracketed on a logarithmic grid in ``w`` (HE11 lives at
    ``u < 2.405``) and refined with Brent's method.

    Returns
    -------
    FiberMode
    """
    V = fiber.V
    w_hi = V * (1.0 - 1e-12)
    w_lo = math.sqrt(V * V - J0_FIRST_ZERO**2) * (1.0 + 1e-12) if V > J0_FIRST_ZERO else 1e-280
    f = lambda t: he11_characteristic(math.exp(t), fiber)
    ts = np.linspace(math.log(w_lo), math.log(w_hi), 400)
    vals = [f(t) for t in ts]
    root = None
    for i in range(len(ts) - 1, 0, -1):
        if np.isfinite(vals[i]) and np.isfinite(vals[i - 1]) and vals[i] * vals[i - 1] <= 0:
            root = optimize.brentq(f, ts[i - 1], ts[i], xtol=1e-15, rtol=1e-15)
            break
    if root is None:
        raise ArithmeticError("HE11 root not bracketed for %r; this should not happen" % (fiber,))
    w = math.exp(root)
    u = math.sqrt(V * V - w * w)
    beta = math.sqrt(fiber.eps_clad + (w / fiber.k0a) ** 2)
    mode = FiberMode(fiber, beta, u, w, _fiber_fields_amplitude(fiber, u, w, beta), abs(f(root)))
    return _with_power(mode)


# ---- mode fields ---------------------------------------------------------------


def fiber_field_components(mode, r):
    """Radial profiles of the HE11 fields at radii ``r`` (array).

    Returns ``(e_r, e_phi, e_z, h_r, h_phi, h_z)``. The full fields are
    ``e_r cos, e_phi sin, e_z cos, h_r sin, h_phi cos, h_z sin`` in ``phi``.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float))
    fb = mode.fiber
    a, beta, u, w = fb.k0a, mode.k_par, mode.u, mode.w
    A, B = 1.0, mode.amplitude_ratio
    out = [np.zeros(r.shape, dtype=complex) for _ in range(6)]
    inside = r < a
    j1u = specfun.bessel_j(1, u).real
    k1w = specfun.bessel_k(1, w).real
    for idx in np.flatnonzero(r >= 0):
        ri = r[idx]
        if inside[idx]:
            q2 = (u / a) ** 2
            t = u * ri / a
            eps = fb.eps_core
            f = specfun.bessel_j(1, t).real
            df = specfun.bessel_j_prime(1, t).real * u / a
            g_over_r = (0.5 * (u / a) if t == 0 else f / ri)  # J1(t)/r -> u/(2a)
        else:
            q2 = -((w / a) ** 2)
            t = w * ri / a
            eps = fb.eps_clad
            sc = j1u / k1w
            f = sc * specfun.bessel_k(1, t).real
            df = sc * specfun.bessel_k_prime(1, t).real * w / a
            g_over_r = f / ri
        ez, hz = A * f, B * f
        dez, dhz = A * df, B * df
        ez_r, hz_r = A * g_over_r, B * g_over_r
        out[0][idx] = 1j / q2 * (beta * dez + hz_r)
        out[1][idx] = 1j / q2 * (-beta * ez_r - dhz)
        out[2][idx] = ez
        out[3][idx] = 1j / q2 * (beta * dhz + eps * ez_r)
        out[4][idx] = 1j / q2 * (beta * hz_r + eps * dez)
        out[5][idx] = hz
    return tuple(out)


def _gauss(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * (x + 1.0) + a, 0.5 * (b - a) * w


def _fiber_power(mode, n=96):
    """Guided power ``(1/2) Re int (E x H*) . z dA``."""
    a = mode.fiber.k0a
    r_in, w_in = _gauss(n, 0.0, a)
    # cladding: map [0, 1) -> [a, inf) through r = a + s/(1-s) * (a / w)
    s, ws = _gauss(n, 0.0, 1.0)
    scale = a / mode.w
    r_out = a + scale * s / (1.0 - s)
    w_out = ws * scale / (1.0 - s) ** 2
    total = 0.0
    for r, wt in ((r_in, w_in), (r_out, w_out)):
        er, ep, _, hr, hp, _ = fiber_field_components(mode, r)
        total += np.sum(wt * r * (er * np.conj(hp) - ep * np.conj(hr)).real)
    return 0.5 * math.pi * total


def _with_power(mode):
    return FiberMode(mode.fiber, mode.k_par, mode.u, mode.w, mode.amplitude_ratio, mode.residual, _fiber_power(mode))


@dataclass(frozen=True)
class PlasmonField:
    """Exterior and interior fields of the TM0 wire plasmon, plus its guided power."""

    k_par: complex
    kappa1: complex
    kappa2: complex
    k0R: float
    eps1: complex
    eps2: complex
    interior_amplitude: complex
    power: float


def plasmon_field(mode, geom, n=96):
    """Fields ``E_z = K0(kappa1 rho)``, ``E_rho = (i k/kappa1) K1(kappa1 rho)`` outside.

    Inside, ``E_z = B I0(kappa2 rho)`` with ``B = K0(kappa1 R) / I0(kappa2 R)``.
    The guided power is ``pi Re sum_j (eps_j*/k*) int |E_rho|^2 rho d rho``.
    """
    k, k1, k2, R = mode.k_par, mode.kappa1, mode.kappa2, geom.k0R
    B = specfun.bessel_k(0, k1 * R) / specfun.bessel_i(0, k2 * R)
    r_in, w_in = _gauss(n, 0.0, R)
    e_in = np.array([-(1j * k / k2) * B * specfun.bessel_i(1, k2 * r) for r in r_in])
    p_in = (np.conj(geom.eps2) / np.conj(k)).real * np.sum(w_in * r_in * np.abs(e_in) ** 2)
    s, ws = _gauss(n, 0.0, 1.0)
    scale = 1.0 / k1.real
    r_out = R + scale * s / (1.0 - s)
    w_out = ws * scale / (1.0 - s) ** 2
    e_out = _plasmon_radial(k, k1, r_out)
    p_out = (np.conj(geom.eps1) / np.conj(k)).real * np.sum(w_out * r_out * np.abs(e_out) ** 2)
    return PlasmonField(k, k1, k2, R, geom.eps1, geom.eps2, B, float(math.pi * (p_in + p_out)))


def _plasmon_radial(k, kappa1, rho):
    z = kappa1 * np.asarray(rho)
    s = specfun.bessel_k_seq_scaled_array(1, z.ravel())
    k1 = s[:, 1] * np.exp(-z.ravel())
    return ((1j * k / kappa1) * k1).reshape(np.shape(rho))


def _plasmon_exterior(pf, rho):
    z = pf.kappa1 * rho.ravel()
    s = specfun.bessel_k_seq_scaled_array(1, z)
    ez = s[:, 0] * np.exp(-z)
    er = (1j * pf.k_par / pf.kappa1) * s[:, 1] * np.exp(-z)
    return er.reshape(rho.shape), ez.reshape(rho.shape)


# ---- coupling ------------------------------------------------------------------------


def _overlap(pf, fmode, gap, n_r, n_phi, conj_plasmon=True):
    a = fmode.fiber.k0a
    D = pf.k0R + gap + a
    r, wr = _gauss(n_r, 0.0, a)
    er, ep, ez, _, _, _ = fiber_field_components(fmode, r)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    c, s = np.cos(phi)[None, :], np.sin(phi)[None, :]
    R_, E_r, E_p, E_z = r[:, None], er[:, None], ep[:, None], ez[:, None]
    fx = E_r * c * c - E_p * s * s
    fy = (E_r + E_p) * c * s
    fz = E_z * c
    X = D + R_ * c
    Yy = R_ * s
    rho = np.hypot(X, Yy)
    p_r, p_z = _plasmon_exterior(pf, rho)
    px, py = p_r * X / rho, p_r * Yy / rho
    if conj_plasmon:
        integrand = np.conj(px) * fx + np.conj(py) * fy + np.conj(p_z) * fz
    else:
        integrand = px * np.conj(fx) + py * np.conj(fy) + p_z * np.conj(fz)
    return np.sum(wr[:, None] * R_ * integrand) * (2.0 * math.pi / n_phi)


def coupling_constant(plasmon_mode, geom, fiber_mode, k0_gap, conj_plasmon=True, rtol=KAPPA_RTOL):
    """Coupling per unit length between the wire plasmon and the fiber HE11 mode.

    ``kappa = (1/4) (eps_core - eps1) int_core e_p* . e_f dA / sqrt(P_p P_f)``,
    with the fiber axis a surface-to-surface gap ``k0_gap`` from the wire. The
    plasmon field over the core is its exact exterior form. The quadrature
    is Gauss-Legendre in the fiber radius times a periodic trapezoid in
    angle, and both orders double until ``kappa`` changes by less than
    ``rtol``.

    Returns
    -------
    complex
        Real up to the plasmon loss; callers use ``abs``.
    """
    if not k0_gap >= 0:
        raise ValueError("gap must be non-negative")
    pf = plasmon_field(plasmon_mode, geom)
    d_eps = fiber_mode.fiber.eps_core - complex(geom.eps1).real
    norm = math.sqrt(abs(pf.power) * fiber_mode.power)
    n_r, n_phi = 24, 48
    prev = _overlap(pf, fiber_mode, k0_gap, n_r, n_phi, conj_plasmon)
    while n_r < 1024:
        n_r *= 2
        n_phi *= 2
        cur = _overlap(pf, fiber_mode, k0_gap, n_r, n_phi, conj_plasmon)
        if abs(cur - prev) <= rtol * abs(cur):
            return 0.25 * d_eps * complex(cur) / norm
        prev = cur
    raise ArithmeticError("coupling quadrature did not converge")


# ---- coupled-mode transfer ------------------------------------------------------


def _sinhc(x):
    if abs(x) < 1e-6:
        return 1.0 + x * x / 6.0
    return cmath.sinh(x) / x


def coupled_amplitudes(kappa, delta_beta, loss_rate, k0L):
    """Closed-form ``(a(L), b(L))`` for ``a(0) = 1``, ``b(0) = 0``.

    ``a' = -(loss_rate/2) a + i kappa b e^{i dbeta z}``,
    ``b' = i kappa a e^{-i dbeta z}``. In terms of ``B = b e^{i dbeta z}``
    the system has constant matrix ``[[-g, i kappa], [i kappa, i dbeta]]``
    with ``g = loss_rate / 2``.
    """
    g = 0.5 * loss_rate
    L = k0L
    sigma = 0.5 * (-g + 1j * delta_beta)
    delta = cmath.sqrt(0.25 * (g + 1j * delta_beta) ** 2 - kappa * kappa)
    if abs(delta * L) < 1.0:
        env = cmath.exp(sigma * L)
        ch = env * cmath.cosh(delta * L)
        sh = env * L * _sinhc(delta * L)  # e^{sigma L} sinh(delta L) / delta
    else:
        # Re(sigma +- delta) <= 0, so neither exponential can overflow
        ep, em = cmath.exp((sigma + delta) * L), cmath.exp((sigma - delta) * L)
        ch = 0.5 * (ep + em)
        sh = 0.5 * (ep - em) / delta
    a = ch - 0.5 * (g + 1j * delta_beta) * sh
    B = 1j * kappa * sh
    return a, B * cmath.exp(-1j * delta_beta * L)


def transfer_efficiency(kappa, delta_beta, loss_rate, k0L):
    """Fraction ``|b(L)|^2`` of plasmon power delivered to the fiber.

    Parameters
    ----------
    kappa : float
        Coupling constant (``>= 0``).
    delta_beta : float
        Fiber minus plasmon propagation constant.
    loss_rate : float
        Plasmon power attenuation ``2 Im k_par`` (``>= 0``).
    k0L : float
        Interaction length (``>= 0``).
    """
    if kappa < 0 or loss_rate < 0 or k0L < 0:
        raise ValueError("kappa, loss_rate and length must be non-negative")
    return abs(coupled_amplitudes(kappa, delta_beta, loss_rate, k0L)[1]) ** 2


def optimal_length(kappa, delta_beta, loss_rate):
    """Interaction length maximising :func:`transfer_efficiency`; returns ``(L, T)``.

    Closed form when phase matched; otherwise a scan over the first transfer
    lobe refined by golden-section search.
    """
    if kappa <= 0:
        return 0.0, 0.0
    g = 0.5 * loss_rate
    if delta_beta == 0:
        if kappa > 0.5 * g:
            omega = math.sqrt(kappa * kappa - 0.25 * g * g)
            L = math.atan2(2.0 * omega, g) / omega
        else:
            dl = math.sqrt(0.25 * g * g - kappa * kappa)
            L = math.atanh(2.0 * dl / g) / dl if dl > 0 else 2.0 / g
        return L, transfer_efficiency(kappa, 0.0, loss_rate, L)
    omega = math.sqrt(kappa * kappa + 0.25 * delta_beta * delta_beta)
    L_max = 1.5 * math.pi / omega
    f = lambda L: transfer_efficiency(kappa, delta_beta, loss_rate, L)
    grid = np.linspace(0.0, L_max, 400)
    vals = [f(x) for x in grid]
    i = int(np.argmax(vals))
    L, T = golden_section_max(f, grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)], rtol=1e-10)
    return L, T


# ---- design ------------------------------------------------------------------------------


def phase_match(k_par, fiber_template):
    """Core radius at which the HE11 propagation constant equals ``Re k_par``.

    Raises
    ------
    UnmatchableError
        If ``Re k_par`` is outside ``(sqrt(eps_clad), sqrt(eps_core))``. The
        exception's ``bound`` names the violated limit.
    """
    target = complex(k_par).real
    lo_b, hi_b = math.sqrt(fiber_template.eps_clad), math.sqrt(fiber_template.eps_core)
    if target >= hi_b:
        raise UnmatchableError(
            "plasmon Re k = %.6g exceeds the core index bound %.6g" % (target, hi_b), bound=hi_b
        )
    if target <= lo_b:
        raise UnmatchableError(
            "plasmon Re k = %.6g is below the cladding bound %.6g" % (target, lo_b), bound=lo_b
        )
    f = lambda la: solve_fiber_he11(fiber_template.with_radius(math.exp(la))).k_par - target
    lo, hi = math.log(0.05), math.log(2.0)
    while f(lo) > 0:
        lo -= 1.0
    while f(hi) < 0:
        hi += 1.0
    la = optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-15)
    return math.exp(la)


@dataclass(frozen=True)
class CouplerDesign:
    fiber: FiberGeometry
    k0_gap: float
    k0L_ex: float
    kappa: float
    delta_beta: float
    transfer: float
    loss_rate: float = 0.0


# coarse tolerance while searching; the winner is re-evaluated at KAPPA_RTOL
SEARCH_KAPPA_RTOL = 1e-4


@functools.lru_cache(maxsize=4096)
def _fiber_mode_cached(fiber):
    return solve_fiber_he11(fiber)


def _evaluate(plasmon_mode, geom, fiber, gap, rtol=KAPPA_RTOL):
    fm = _fiber_mode_cached(fiber)
    kap = abs(coupling_constant(plasmon_mode, geom, fm, gap, rtol=rtol))
    db = float(fm.k_par - plasmon_mode.k_par.real)
    loss = float(2.0 * plasmon_mode.k_par.imag)
    L, T = optimal_length(kap, db, loss)
    return CouplerDesign(fiber, float(gap), float(L), float(kap), db, float(T), loss)


def optimize_coupler(plasmon_mode, geom, fiber_template=None, min_gap=DEFAULT_MIN_GAP, max_gap=2.0):
    """Best ``(k0a, gap, L)`` for transferring the plasmon into the fiber.

    The core radius starts at the phase-matched value; a bounded
    Nelder-Mead search in ``(log a, gap)`` follows, with the interaction
    length optimised for every candidate. The gap is bounded below by
    ``min_gap``. Without that bound the optimum collapses onto the wire.

    Raises
    ------
    UnmatchableError
    """
    if fiber_template is None:
        fiber_template = FiberGeometry(1.0, CORE_EPS, complex(geom.eps1).real)
    a0 = phase_match(plasmon_mode.k_par, fiber_template)
    cache = {}

    def design(p):
        key = (float(p[0]), float(p[1]))
        if key not in cache:
            fiber = fiber_template.with_radius(math.exp(p[0]))
            cache[key] = _evaluate(plasmon_mode, geom, fiber, p[1], SEARCH_KAPPA_RTOL)
        return cache[key]

    x0 = [math.log(a0), min_gap]
    res = optimize.minimize(
        lambda p: -design(p).transfer,
        x0,
        method="Nelder-Mead",
        bounds=[(math.log(a0) - 0.7, math.log(a0) + 0.7), (min_gap, max_gap)],
        options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 400,
                 "initial_simplex": [x0, [x0[0] + 0.05, x0[1]], [x0[0], x0[1] + 0.05]]},
    )
    best = design(res.x)
    start = design(x0)
    if start.transfer > best.transfer:
        best = start
    best = _evaluate(plasmon_mode, geom, best.fiber, best.k0_gap)
    if not best.fiber.single_mode:
        warnings.warn("fiber with V = %.3f supports more than one mode" % best.fiber.V, MultimodeWarning)
    return best


# ---- end to end ------------------------------------------------------------------------


@dataclass(frozen=True)
class EfficiencyConfig:
    eps1: complex = HOST_EPS
    eps2: complex = SILVER_EPS
    eps_core: float = CORE_EPS
    single_sided: bool = False
    min_gap: float = DEFAULT_MIN_GAP


@dataclass(frozen=True)
class EfficiencyResult:
    front_end: str
    k0R: float
    P: float
    branching: float
    transfer: float
    matchable: bool
    k0d: float = float("nan")
    k0v: float = float("nan")
    design: CouplerDesign = None
    note: str = ""


@functools.lru_cache(maxsize=256)
def _shared_design(k0R, eps1, eps2, eps_core, min_gap):
    # the coupler does not depend on the front end, so wire and tip rows share it
    geom = WireGeometry(k0R, eps1, eps2)
    mode = solve_fundamental(geom)
    template = FiberGeometry(1.0, eps_core, eps1.real)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MultimodeWarning)
            return optimize_coupler(mode, geom, template, min_gap=min_gap)
    except UnmatchableError as exc:
        return exc


def single_photon_efficiency(front_end, k0R, config=None):
    """Probability that one excitation ends up as one photon in the fiber.

    ``P = branching * transfer``. For the wire, branching is the plasmon
    fraction at the optimal emitter distance. For the tip it is the
    propagated plasmon fraction ``1 - P_E`` at the jointly optimised
    ``(d, v)``. Both propagation directions are collected unless
    ``config.single_sided`` is set, which halves the branching. A radius
    whose plasmon is too slow for any fiber gives ``P = 0`` with
    ``matchable = False``.
    """
    if config is None:
        config = EfficiencyConfig()
    geom = WireGeometry(float(k0R), config.eps1, config.eps2)
    mode = solve_fundamental(geom)
    if front_end == "wire":
        d, rates = optimal_distance(geom, mode=mode)
        branching, v = rates.branching, float("nan")
    elif front_end == "tip":
        opt = tip_error_probability(
            float(k0R), config.eps1, config.eps2,
            cpl=calibrate_tip_coupling(config.eps1, config.eps2),
            dispersion=dispersion_memo(config.eps1, config.eps2),
        )
        branching, d, v = 1.0 - opt.P_E, opt.k0d, opt.k0v
    else:
        raise ValueError("front_end must be 'wire' or 'tip'")
    if config.single_sided:
        branching *= 0.5
    design = _shared_design(float(k0R), complex(config.eps1), complex(config.eps2), float(config.eps_core),
                            float(config.min_gap))
    if isinstance(design, UnmatchableError):
        return EfficiencyResult(front_end, float(k0R), 0.0, branching, 0.0, False, d, v, None, str(design))
    if not design.fiber.single_mode:
        warnings.warn("fiber with V = %.3f supports more than one mode" % design.fiber.V, MultimodeWarning)
    return EfficiencyResult(
        front_end, float(k0R), branching * design.transfer, branching, design.transfer, True, d, v, design
    )
