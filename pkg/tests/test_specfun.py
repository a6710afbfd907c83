import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanoplasmon import specfun
from nanoplasmon.specfun import BesselDomainError, BranchCutError

from oracles import bisect, i_series, i_series_terms, j_series, k_integral


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def random_points(n, seed, rmax=30.0, right_half=False):
    rng = np.random.default_rng(seed)
    r = 10 ** rng.uniform(-2, math.log10(rmax), n)
    lim = 0.5 * math.pi if right_half else math.pi
    th = rng.uniform(-lim, lim, n)
    if right_half:
        th *= 0.98
    return [complex(z) for z in r * np.exp(1j * th)]


# ---- trivial values ----------------------------------------------------------------


def test_i_at_zero(backend):
    assert specfun.bessel_i(0, 0) == 1
    assert specfun.bessel_i(1, 0) == 0


def test_j_at_zero(backend):
    assert specfun.bessel_j(0, 0) == 1
    assert specfun.bessel_j(1, 0) == 0


def test_i0_at_one_against_thirty_term_series(backend):
    ref = i_series_terms(0, 1.0, 30)
    assert rel(specfun.bessel_i(0, 1.0), ref) < 1e-14


def test_k0_at_one_against_integral(backend):
    ref = k_integral(0, 1.0)
    assert rel(specfun.bessel_k(0, 1.0), ref) < 1e-13


def test_k0_decays_monotonically(backend):
    vals = [abs(specfun.bessel_k(0, x)) for x in (5.0, 10.0, 20.0)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_j0_first_zero_by_bisection(backend):
    ours = bisect(lambda x: specfun.bessel_j(0, x).real, 2.0, 3.0)
    oracle = bisect(lambda x: j_series(0, x).real, 2.0, 3.0)
    assert abs(ours - oracle) < 1e-12
    assert abs(ours - 2.404825557695773) < 1e-12


# ---- identities ---------------------------------------------------------------------


@pytest.mark.parametrize("z", [0.3 + 0.1j, 2 + 1j, 7.5 - 3j, 25 + 0.5j])
def test_derivative_recurrences(backend, z):
    assert rel(specfun.bessel_i_prime(0, z), specfun.bessel_i(1, z)) < 1e-14
    assert rel(specfun.bessel_k_prime(0, z), -specfun.bessel_k(1, z)) < 1e-14


def wronskian_error(m, z):
    w = specfun.bessel_i(m, z) * specfun.bessel_k_prime(m, z) - specfun.bessel_i_prime(m, z) * specfun.bessel_k(m, z)
    return abs(w + 1.0 / z) * abs(z)


def test_wronskian_at_2_plus_1j(backend):
    for m in range(4):
        assert wronskian_error(m, 2 + 1j) < 1e-12


def wronskian_grid():
    # 10 moduli x 10 angles on the closed right half-plane, 0.01 <= |z| <= 30
    radii = np.logspace(-2, math.log10(30.0), 10)
    angles = np.linspace(-0.5 * math.pi, 0.5 * math.pi, 10)
    return [complex(r * cmath.exp(1j * a)) for r in radii for a in angles]


def test_wronskian_grid(backend):
    worst = max(wronskian_error(m, z) for m in range(4) for z in wronskian_grid())
    assert worst < 1e-12


@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_i_recurrence(backend, m):
    for z in random_points(20, 11 + m):
        lhs = specfun.bessel_i(m - 1, z) - specfun.bessel_i(m + 1, z)
        rhs = 2 * m / z * specfun.bessel_i(m, z)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), abs(rhs), 1e-300)


@pytest.mark.parametrize("family", ["i", "k", "j", "kp"])
def test_conjugate_symmetry(backend, family):
    fn = {"i": specfun.bessel_i, "k": specfun.bessel_k, "j": specfun.bessel_j, "kp": specfun.bessel_k_prime}[family]
    right = family in ("k", "kp")
    for z in random_points(30, 5, right_half=right):
        for m in range(4):
            assert rel(fn(m, z.conjugate()), fn(m, z).conjugate()) < 1e-13


# ---- oracle agreement on 50 random points per family -----------------------------------


def test_i_against_series_oracle(backend):
    for k, z in enumerate(random_points(50, 1)):
        m = k % 4
        assert rel(specfun.bessel_i(m, z), i_series(m, z)) < 1e-10


def test_j_against_series_oracle(backend):
    for k, z in enumerate(random_points(50, 2)):
        m = k % 4
        assert rel(specfun.bessel_j(m, z), j_series(m, z)) < 1e-10


def test_k_against_integral_oracle(backend):
    for k, z in enumerate(random_points(50, 3, right_half=True)):
        m = k % 4
        assert rel(specfun.bessel_k(m, z), k_integral(m, z)) < 1e-10


def test_higher_orders_against_oracle(backend):
    for z in (0.5 + 0.2j, 4.0 - 1.0j, 18.0 + 6.0j):
        seq = specfun.bessel_i_seq_scaled(20, z)
        for m in (7, 12, 20):
            ref = i_series(m, z) * math.exp(-abs(z.real))
            assert rel(seq[m], ref) < 1e-10


# ---- scaled forms, errors, vectorisation -------------------------------------------------


def test_scaled_large_argument_has_no_overflow(backend):
    z = 900.0 + 3.0j
    assert math.isfinite(abs(specfun.bessel_i_scaled(1, z)))
    assert math.isfinite(abs(specfun.bessel_k_scaled(1, z)))
    with pytest.raises(OverflowError):
        specfun.bessel_i(1, z)


def test_scaled_matches_unscaled(backend):
    z = 3.0 - 2.0j
    assert rel(specfun.bessel_k_scaled(2, z) * cmath.exp(-z), specfun.bessel_k(2, z)) < 1e-14
    assert rel(specfun.bessel_i_scaled(2, z) * math.exp(abs(z.real)), specfun.bessel_i(2, z)) < 1e-14


@pytest.mark.parametrize("z", [0.0, -1.0, -3.5 + 0j])
def test_k_branch_cut_rejected(backend, z):
    with pytest.raises(BranchCutError):
        specfun.bessel_k(0, z)


@pytest.mark.parametrize("z", [complex("nan"), complex("inf"), complex(1, float("inf"))])
def test_non_finite_rejected(backend, z):
    for fn in (specfun.bessel_i, specfun.bessel_j, specfun.bessel_k):
        with pytest.raises(BesselDomainError):
            fn(0, z)


def test_negative_order_rejected():
    with pytest.raises(BesselDomainError):
        specfun.bessel_i(-1, 1.0)
    with pytest.raises(BesselDomainError):
        specfun.bessel_j(1.5, 1.0)


def test_array_forms_match_scalar(backend):
    zs = random_points(40, 9, right_half=True)
    ks = specfun.bessel_k_seq_scaled_array(3, zs)
    iss = specfun.bessel_i_seq_scaled_array(3, zs)
    js = specfun.bessel_j_seq_array(3, zs)
    for n, z in enumerate(zs):
        assert np.allclose(ks[n], specfun.bessel_k_seq_scaled(3, z), rtol=1e-15, atol=0)
        assert np.allclose(iss[n], specfun.bessel_i_seq_scaled(3, z), rtol=1e-15, atol=0)
        assert np.allclose(js[n], specfun.bessel_j_seq(3, z), rtol=1e-15, atol=0)


def test_array_branch_cut_rejected():
    with pytest.raises(BranchCutError):
        specfun.bessel_k_seq_scaled_array(1, [1.0, -2.0])


# ---- backends ------------------------------------------------------------------------------


@pytest.mark.skipif("compiled" not in specfun.available_backends(), reason="compiled core not built")
def test_backends_agree():
    zs = random_points(300, 21)
    zk = random_points(300, 22, right_half=True)
    out = {}
    for name in ("compiled", "python"):
        prev = specfun.use_backend(name)
        try:
            out[name] = (
                specfun.bessel_i_seq_scaled_array(6, zs),
                specfun.bessel_j_seq_array(6, zs),
                specfun.bessel_k_seq_scaled_array(6, zk),
            )
        finally:
            specfun.use_backend(prev)
    for a, b in zip(out["compiled"], out["python"]):
        assert np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)) < 1e-13


def test_use_backend_round_trip():
    first = specfun.active_backend()
    prev = specfun.use_backend("python")
    assert prev == first and specfun.active_backend() == "python"
    specfun.use_backend(prev)
    assert specfun.active_backend() == first
    with pytest.raises(ValueError):
        specfun.use_backend("fortran")


# ---- properties ------------------------------------------------------------------------------

moduli = st.floats(min_value=0.01, max_value=30.0)
angles = st.floats(min_value=-math.pi / 2, max_value=math.pi / 2)


@settings(max_examples=200, deadline=None)
@given(moduli, angles, st.integers(min_value=0, max_value=3))
def test_wronskian_property(r, a, m):
    z = complex(r * cmath.exp(1j * a))
    if z.imag == 0 and z.real <= 0:
        return
    assert wronskian_error(m, z) < 1e-12


@settings(max_examples=200, deadline=None)
@given(moduli, st.floats(min_value=-math.pi, max_value=math.pi), st.integers(min_value=1, max_value=6))
def test_j_recurrence_property(r, a, m):
    z = complex(r * cmath.exp(1j * a))
    lhs = specfun.bessel_j(m - 1, z) + specfun.bessel_j(m + 1, z)
    rhs = 2 * m / z * specfun.bessel_j(m, z)
    scale = max(abs(specfun.bessel_j(m - 1, z)), abs(specfun.bessel_j(m + 1, z)), 1e-300)
    assert abs(lhs - rhs) <= 1e-10 * scale
