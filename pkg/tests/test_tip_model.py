import math
import threading
import warnings

import numpy as np
import pytest
from scipy import integrate

from nanoplasmon import emitter_coupling as ec
from nanoplasmon import tip_model as tm
from nanoplasmon.wire_modes import WireGeometry, solve_fundamental


@pytest.fixture(scope="module")
def cpl():
    return tm.calibrate_tip_coupling()


@pytest.fixture(scope="module")
def memo():
    return tm.dispersion_memo()


# ---- closed-form rates ----------------------------------------------------------------------


def test_rad_limits():
    assert tm.tip_rate_rad(1e12, 1.0) == pytest.approx(1.0, abs=1e-9)
    assert tm.tip_rate_rad(0.1, 0.1, 2.0, 2.0) == 1.0


def test_rad_silver_d_equal_v():
    expected = abs(complex(-4.2, 0.06)) ** 2
    assert tm.tip_rate_rad(0.05, 0.05) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(17.6, abs=0.05)


def test_nonrad_twice_the_printed_wire_value():
    g = WireGeometry(0.1)
    for d in (1e-3, 0.02, 0.3):
        wire = ec.wire_rate_nonrad(ec.DipoleEmitter.radial(d), g, prefactor=ec.PRINTED_NONRAD_PREFACTOR)
        assert tm.tip_rate_nonrad(d) / wire == pytest.approx(2.0, rel=1e-14)


def test_nonrad_equal_to_default_wire_value():
    g = WireGeometry(0.1)
    wire = ec.wire_rate_nonrad(ec.DipoleEmitter.radial(0.02), g)
    assert tm.tip_rate_nonrad(0.02) == pytest.approx(wire, rel=1e-15)


def test_nonrad_lossless_and_scaling():
    assert tm.tip_rate_nonrad(0.01, 2.0, -50.0) == 0.0
    assert tm.tip_rate_nonrad(0.01) / tm.tip_rate_nonrad(0.02) == pytest.approx(8.0, rel=1e-14)


def test_nonrad_resonance_rejected():
    with pytest.raises(ec.ResonanceError):
        tm.tip_rate_nonrad(0.1, 2.0, -2.0)


def test_plasmon_limits(cpl):
    assert tm.tip_rate_plasmon(1e4, 0.01, cpl) == 0.0
    u = 3.0
    a = tm.tip_rate_plasmon(u * 0.02, 0.02, cpl)
    b = tm.tip_rate_plasmon(u * 0.01, 0.01, cpl)
    assert b / a == pytest.approx(8.0, rel=1e-12)


def test_rates_validation():
    with pytest.raises(ValueError):
        tm.tip_rate_rad(-1.0, 0.1)
    with pytest.raises(ValueError):
        tm.TipGeometry(0.0)
    assert tm.TipGeometry(0.1, 0.3).z_final == pytest.approx(0.9)


# ---- calibration ---------------------------------------------------------------------------------


def test_calibration_closure(cpl):
    v = 1e-5
    f = lambda lu: tm.tip_rates(math.exp(lu) * v, v, cpl).purcell
    lu = np.linspace(math.log(0.1), math.log(100), 4001)
    best = max(f(x) for x in lu)
    assert best == pytest.approx(tm.TIP_PURCELL_TARGET, rel=1e-3)


def test_calibration_record(cpl):
    rec = cpl.calibration_source
    assert rec["target_purcell"] == tm.TIP_PURCELL_TARGET
    assert rec["alpha_pl_tip"] == cpl.alpha_pl_tip
    assert tm.calibrate_tip_coupling() == cpl


def test_pre_propagation_floor(cpl):
    ((v, err, d),) = tm.tip_error_vs_v([1e-4], cpl=cpl)
    assert err == pytest.approx(1 / (1 + 2.5e3), rel=0.05)


# ---- dispersion memo and eikonal attenuation ---------------------------------------------------------


def test_memo_matches_solver(memo):
    for r in (2e-4, 3e-3, 0.07, 0.5, 2.5):
        direct = solve_fundamental(WireGeometry(r)).k_par.imag
        assert memo(r) == pytest.approx(direct, rel=1e-6)


def test_memo_thread_safe():
    m = tm.DispersionMemo(points_per_decade=10, rho_min=1e-3, rho_max=0.1)
    out = []
    ts = [threading.Thread(target=lambda: out.append(m(0.02))) for _ in range(6)]
    for t in ts:
        t.start()
    for t in ts:
        t.join()
    assert len(set(out)) == 1


def test_memo_range(memo):
    with pytest.raises(ValueError):
        memo(10.0)
    with pytest.raises(ValueError):
        memo(0.0)


def test_lossless_attenuation_is_one():
    assert tm.eikonal_attenuation(tm.TipGeometry(0.01, 0.5), lambda r: 0.0) == 1.0


def test_zero_radius_attenuation_is_one(memo):
    assert tm.eikonal_attenuation(tm.TipGeometry(0.01, 0.0), memo) == 1.0


def test_attenuation_in_unit_interval(memo):
    for v in (1e-3, 0.1, 1.0):
        for R in (1e-3, 0.1, 1.0):
            a = tm.eikonal_attenuation(tm.TipGeometry(v, R), memo)
            assert 0 < a <= 1


def test_quadrature_node_doubling(memo):
    a = tm.propagation_integral(0.7, memo, nodes=200)
    b = tm.propagation_integral(0.7, memo, nodes=400)
    assert abs(a - b) < 1e-8 * abs(b)
    assert tm.propagation_integral(0.7, memo) == pytest.approx(b, rel=1e-8)


def test_change_of_variables_against_excised_z_quadrature(memo):
    R, v = 0.3, 0.05
    Z = R * R / v
    exponent = -math.log(tm.eikonal_attenuation(tm.TipGeometry(v, R), memo))
    f = lambda z: memo(math.sqrt(v * z))
    eps = [Z * 1e-6 * 4**k for k in range(5)]
    vals = [2 * integrate.quad(f, e, Z, epsabs=0, epsrel=1e-12, limit=500)[0] for e in eps]
    # the excised piece behaves like a power series in sqrt(eps)
    extrapolated = np.polyfit(np.sqrt(eps), vals, 3)[-1]
    assert extrapolated == pytest.approx(exponent, rel=1e-6)


# ---- error probability ----------------------------------------------------------------------------------


def test_tip_beats_wire_above_005(cpl, memo):
    for R in np.logspace(math.log10(0.05), 0, 6):
        tip = tm.tip_error_probability(float(R), cpl=cpl, dispersion=memo)
        _, rates = ec.optimal_distance(WireGeometry(float(R)))
        assert tip.P_E < rates.error


def test_tip_error_increases_with_radius(cpl, memo):
    radii = np.logspace(-3, 0, 10)
    pe = [tm.tip_error_probability(float(R), cpl=cpl, dispersion=memo).P_E for R in radii]
    assert all(a < b for a, b in zip(pe, pe[1:]))


def test_tip_optimum_consistent(cpl, memo):
    o = tm.tip_error_probability(0.2, cpl=cpl, dispersion=memo)
    assert o.converged
    again = 1 - o.rates.pl * o.attenuation / o.rates.total
    assert o.P_E == pytest.approx(again, rel=1e-12)
    assert 0 <= o.P_E <= 1


def test_tip_optimiser_restarts_change_nothing_material(cpl, memo):
    a = tm.tip_error_probability(0.2, cpl=cpl, dispersion=memo, seeds=8).P_E
    b = tm.tip_error_probability(0.2, cpl=cpl, dispersion=memo, seeds=16).P_E
    assert b == pytest.approx(a, rel=1e-6)


def test_tip_error_needs_positive_radius():
    with pytest.raises(ValueError):
        tm.tip_error_probability(0.0)


def test_no_warnings_on_grid(cpl, memo):
    with warnings.catch_warnings():
        warnings.simplefilter("error", tm.OptimizerWarning)
        tm.tip_error_probability(0.5, cpl=cpl, dispersion=memo)
