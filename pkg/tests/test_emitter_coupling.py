import cmath
import threading

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanoplasmon import emitter_coupling as ec
from nanoplasmon.wire_modes import WireGeometry, quasistatic_constant, solve_fundamental

SILVER = complex(-50, 0.6)


def radial(d):
    return ec.DipoleEmitter.radial(d)


# ---- reflection coefficients ---------------------------------------------------------------


@pytest.mark.parametrize("m", [0, 1, 2, 5])
def test_alpha_vanishes_without_contrast(m):
    g = WireGeometry(0.1, 2.0, 2.0)
    for h in (0.3, 3.0, 40.0):
        assert ec.alpha_m(m, h, g) == 0


@pytest.mark.parametrize("m,h", [(0, 7.0), (1, 2.5), (3, 30.0)])
def test_alpha_boundary_conditions(m, h):
    """Outside: I_m + c K_m with c = eps1 alpha_m; inside: b I_m. Check both matching conditions."""
    g = WireGeometry(0.1)
    eps1, eps2 = complex(g.eps1), complex(g.eps2)
    c = eps1 * ec.alpha_m(m, h, g)
    with mp.workdps(30):
        x = mp.mpf(h * g.k0R)
        I, K = mp.besseli(m, x), mp.besselk(m, x)
        Ip = mp.diff(lambda t: mp.besseli(m, t), x)
        Kp = mp.diff(lambda t: mp.besselk(m, t), x)
        I, K, Ip, Kp = (complex(v) for v in (I, K, Ip, Kp))
    b = 1 + c * K / I
    phi_out, phi_in = I + c * K, b * I
    d_out, d_in = eps1 * (Ip + c * Kp), eps2 * b * Ip
    assert abs(phi_out - phi_in) < 1e-8 * abs(phi_out)
    assert abs(d_out - d_in) < 1e-8 * abs(d_out)


def test_alpha1_small_h_limit():
    g = WireGeometry(0.1)
    target = -(g.eps2 - g.eps1) / (g.eps2 + g.eps1)
    for h in (1e-3, 1e-4):
        x = h * g.k0R
        val = ec.alpha_m(1, h, g) * 2 * g.eps1 / x**2
        assert abs(val - target) < 1e-6 * abs(target)


def test_alpha0_pole_near_quasistatic_location():
    g = WireGeometry(0.01, 2.0, -50.0)
    hp = ec.plasmon_pole(g)
    # |alpha_0| blows up approaching the pole along the real axis
    vals = [abs(ec.alpha_m(0, hp.real * (1 + s), g)) for s in (1e-2, 1e-4, 1e-6)]
    assert vals[0] < vals[1] < vals[2]


@pytest.mark.xfail(strict=True, reason="the exact pole sits 4.4% from the leading-log constant")
def test_pole_matches_quasistatic_constant_to_two_percent():
    g = WireGeometry(0.001)
    C = quasistatic_constant()
    assert abs(ec.plasmon_pole(g) * g.k0R - C) / abs(C) < 0.02


def test_pole_matches_full_solver_at_small_radius():
    g = WireGeometry(0.001)
    assert abs(ec.plasmon_pole(g) - solve_fundamental(g).k_par) / abs(ec.plasmon_pole(g)) < 1e-4


# ---- residue extraction -------------------------------------------------------------------------


def test_lossless_residue_is_real():
    cpl = ec.extract_plasmon_residue(WireGeometry(0.05, 2.0, -50.0))
    assert abs(cpl.residue.imag) < 1e-8 * abs(cpl.residue)
    assert abs(cpl.pole.imag) < 1e-12


def test_alpha_pl_independent_of_radius():
    a = ec.extract_plasmon_residue(WireGeometry(0.01)).alpha_pl
    b = ec.extract_plasmon_residue(WireGeometry(0.02)).alpha_pl
    assert abs(a - b) <= 1e-6 * abs(a)
    assert a > 0


def test_contour_radii_agree():
    xp, _, radii = ec._pole_and_residue(2 + 0j, SILVER)
    r1 = ec._adaptive_residue(lambda x: ec.alpha_m_scaled(0, x, 2, SILVER) * cmath.exp(2 * x), xp, radii[0])
    r2 = ec._adaptive_residue(lambda x: ec.alpha_m_scaled(0, x, 2, SILVER) * cmath.exp(2 * x), xp, radii[1])
    assert abs(r1 - r2) < 1e-8 * abs(r1)


def test_residue_memo_thread_safe():
    out = []
    eps = (2.0, complex(-37, 0.4))

    def work():
        out.append(ec.extract_plasmon_residue(WireGeometry(0.03, *eps)))

    ts = [threading.Thread(target=work) for _ in range(8)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert len(out) == 8 and all(o == out[0] for o in out)


# ---- radiative ---------------------------------------------------------------------------------


def test_rad_far_field_limit():
    assert ec.wire_rate_rad(radial(1e6), WireGeometry(0.1)) == pytest.approx(1.0, abs=1e-12)


def test_rad_no_contrast():
    assert ec.wire_rate_rad(radial(0.05), WireGeometry(0.1, 2.0, 2.0)) == 1.0


def test_rad_silver_at_d_equal_R():
    expected = abs(1 + complex(-52, 0.6) / complex(-48, 0.6) / 4) ** 2
    assert ec.wire_rate_rad(radial(0.1), WireGeometry(0.1)) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(1.61, abs=0.01)


def test_resonance_rejected():
    g = WireGeometry(0.1, 2.0, -2.0)
    with pytest.raises(ec.ResonanceError):
        ec.wire_rate_rad(radial(0.1), g)
    with pytest.raises(ec.ResonanceError):
        ec.wire_rate_nonrad(radial(0.1), g)


def test_axial_dipole_rejected_for_wire():
    with pytest.raises(ValueError):
        ec.wire_rate_rad(ec.DipoleEmitter.axial(0.1), WireGeometry(0.1))


# ---- non-radiative --------------------------------------------------------------------------------


def test_nonrad_lossless_is_zero():
    assert ec.wire_rate_nonrad(radial(0.01), WireGeometry(0.1, 2.0, -50.0)) == 0.0


def test_nonrad_cubic_law():
    g = WireGeometry(0.1)
    assert ec.wire_rate_nonrad(radial(0.01), g) / ec.wire_rate_nonrad(radial(0.02), g) == pytest.approx(8.0, rel=1e-14)


def test_nonrad_printed_prefactor_value():
    # direct arithmetic with the printed coefficient 3/16
    im = (complex(-52, 0.6) / complex(-48, 0.6)).imag
    assert im == pytest.approx(1.04e-3, rel=0.01)
    expected = 3 / 16 / (0.1**3 * 2**1.5) * im
    val = ec.wire_rate_nonrad(radial(0.1), WireGeometry(0.05), prefactor=ec.PRINTED_NONRAD_PREFACTOR)
    assert val == pytest.approx(expected, rel=1e-14)
    assert val == pytest.approx(6.9e-2, rel=0.02)


def test_nonrad_default_is_twice_printed():
    g = WireGeometry(0.05)
    default = ec.wire_rate_nonrad(radial(0.1), g)
    printed = ec.wire_rate_nonrad(radial(0.1), g, prefactor=ec.PRINTED_NONRAD_PREFACTOR)
    assert default == pytest.approx(2 * printed, rel=1e-15)


def test_nonrad_prefactor_against_series():
    """The full multipole series near the surface tends to the 3/8 law, not the printed 3/16."""
    e, g = radial(1e-3), WireGeometry(0.1)
    series = ec.reflected_field_rate(e, g)
    assert series == pytest.approx(ec.wire_rate_nonrad(e, g), rel=0.05)
    assert abs(series / ec.wire_rate_nonrad(e, g, prefactor=ec.PRINTED_NONRAD_PREFACTOR) - 1) > 0.5


# ---- plasmon -------------------------------------------------------------------------------------


def test_plasmon_far_limit():
    g = WireGeometry(0.05)
    near = ec.wire_rate_plasmon(radial(0.05), g)
    far = ec.wire_rate_plasmon(radial(50.0), g)
    assert far < 1e-100 * near
    assert ec.wire_rate_plasmon(radial(1e5), g) == 0.0


def test_plasmon_inverse_cube_law():
    for R in (2e-3, 1e-3):
        big, small = WireGeometry(R), WireGeometry(R / 2)
        ratio = ec.wire_rate_plasmon(radial(2 * R), big) / ec.wire_rate_plasmon(radial(R), small)
        assert ratio == pytest.approx(1 / 8, rel=0.05)


def test_plasmon_rate_against_contour_integration():
    g = WireGeometry(0.02)
    e = radial(0.04)
    oracle = ec.contour_pole_rate(e, g)
    quasi = ec.wire_rate_plasmon(e, g, kappa1=ec.plasmon_pole(g))
    full = ec.wire_rate_plasmon(e, g)
    assert quasi == pytest.approx(oracle, rel=0.01)
    assert full == pytest.approx(oracle, rel=0.01)


def test_rates_non_negative_and_branching_bounded():
    rng = np.random.default_rng(4)
    for _ in range(1000):
        R = 10 ** rng.uniform(-3, 0)
        d = 10 ** rng.uniform(-4, 1)
        r = ec.wire_rates(radial(d), WireGeometry(float(R)))
        assert r.rad >= 0 and r.nonrad >= 0 and r.pl >= 0
        assert 0 <= r.branching <= 1


@settings(max_examples=200, deadline=None)
@given(st.floats(-200, -3), st.floats(0, 20), st.floats(1e-3, 10))
def test_closed_form_rates_non_negative(re2, im2, d):
    g = WireGeometry(0.1, 2.0, complex(re2, im2))
    assert ec.wire_rate_rad(radial(d), g) >= 0
    assert ec.wire_rate_nonrad(radial(d), g) >= 0


def test_decay_rates_validation():
    with pytest.raises(ValueError):
        ec.DecayRates(-1e-3, 0, 0)
    r = ec.DecayRates(1.0, 2.0, 7.0)
    assert r.total == 10 and r.branching == 0.7 and r.purcell == pytest.approx(7 / 3)


def test_emitter_validation():
    with pytest.raises(ValueError):
        ec.DipoleEmitter(0.0)
    with pytest.raises(ValueError):
        ec.DipoleEmitter(0.1, (1.0, 1.0, 0.0))


# ---- optimal distance and error curve ------------------------------------------------------------


@pytest.mark.parametrize("R", [1e-3, 0.01, 0.05, 0.3])
def test_optimal_distance_is_local_maximum(R):
    g = WireGeometry(R)
    d, rates = ec.optimal_distance(g)
    for s in (0.95, 1.05):
        assert rates.branching >= ec.wire_rates(radial(d * s), g).branching


@pytest.mark.parametrize("R", [1e-3, 0.01, 0.05])
def test_optimal_distance_several_radii(R):
    d, _ = ec.optimal_distance(WireGeometry(R))
    assert 0.5 * R <= d <= 20 * R


def test_purcell_small_radius():
    _, rates = ec.optimal_distance(WireGeometry(1e-3))
    assert rates.purcell == pytest.approx(520, rel=0.30)


def test_flat_objective_reported():
    with pytest.raises(ec.FlatObjectiveError):
        ec.optimal_distance(WireGeometry(0.1, 2.0, -50.0), cpl=ec.PlasmonCouplingConstant(0.0, 0j, 0j, 2, -50),
                            nonrad_prefactor=0.0)


def test_error_curve_trend():
    pts = ec.wire_error_curve([WireGeometry(0.01), WireGeometry(0.1)])
    assert pts[0].error < pts[1].error


def test_error_curve_monotone():
    pts = ec.wire_error_curve([WireGeometry(R) for R in np.logspace(-3, 0, 25)])
    errs = [p.error for p in pts]
    assert all(a < b for a, b in zip(errs, errs[1:]))


def test_error_floor_value():
    (pt,) = ec.wire_error_curve([WireGeometry(1e-3)])
    assert pt.error == pytest.approx(1 / (1 + 5.2e2), rel=0.30)


def test_error_floor_doubles_with_loss():
    a = ec.wire_error_curve([WireGeometry(1e-3, 2.0, complex(-50, 0.6))])[0].error
    b = ec.wire_error_curve([WireGeometry(1e-3, 2.0, complex(-50, 1.2))])[0].error
    assert b / a == pytest.approx(2.0, rel=0.10)


def test_error_curve_needs_input():
    with pytest.raises(ValueError):
        ec.wire_error_curve([])
