import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanoplasmon import materials as mat


def test_silver_default_value():
    assert mat.permittivity(mat.silver_default(), 1.0) == complex(-50, 0.6)
    assert mat.host_default().permittivity(0.5) == 2
    assert mat.core_default().permittivity(2.0) == 13


def test_lossless_drude_is_real_negative_below_plasma_wavelength():
    wp = 1.4e16
    lam_p = 2 * math.pi * mat.SPEED_OF_LIGHT_UM / wp
    m = mat.OpticalMedium.drude(wp, 0.0)
    for lam in (1.5 * lam_p, 3 * lam_p, 10 * lam_p):
        eps = m.permittivity(lam)
        assert eps.imag == 0.0 and eps.real < 0


def test_drude_lossy_passive():
    eps = mat.OpticalMedium.drude(1.4e16, 3e13).permittivity(1.0)
    assert eps.imag > 0 and eps.real < 0


def test_table_midpoint():
    m = mat.OpticalMedium.from_rows([(1.0, -40, 0.4), (2.0, -60, 0.8)])
    assert m.permittivity(1.5) == pytest.approx(complex(-50, 0.6), abs=1e-14)


def test_table_out_of_range():
    m = mat.OpticalMedium.from_rows([(1.0, -40, 0.4), (2.0, -60, 0.8)])
    with pytest.raises(mat.WavelengthRangeError):
        m.permittivity(2.5)


def test_bad_wavelength():
    with pytest.raises(mat.MaterialError):
        mat.silver_default().permittivity(0.0)


def write(tmp_path, text):
    p = tmp_path / "eps.csv"
    p.write_text(text, encoding="utf-8")
    return p


def test_load_three_rows(tmp_path):
    p = write(tmp_path, "# silver\nwavelength_um,eps_re,eps_im\n0.5,-10,0.3\n\n0.8,-30,0.4\n1.0,-50,0.6\n")
    m = mat.load_table(p)
    assert len(m.table) == 3
    assert m.permittivity(1.0) == complex(-50, 0.6)


def test_duplicate_wavelength(tmp_path):
    p = write(tmp_path, "wavelength_um,eps_re,eps_im\n0.5,-10,0.3\n0.5,-30,0.4\n")
    with pytest.raises(mat.NonMonotoneTableError):
        mat.load_table(p)


def test_parse_error_reports_line(tmp_path):
    p = write(tmp_path, "wavelength_um,eps_re,eps_im\n0.5,-10,0.3\n# note\n0.7,abc,0.4\n")
    with pytest.raises(mat.TableParseError) as info:
        mat.load_table(p)
    assert info.value.line == 4
    assert ":4:" in str(info.value)


def test_bad_header(tmp_path):
    p = write(tmp_path, "lambda,re,im\n0.5,-10,0.3\n")
    with pytest.raises(mat.TableParseError) as info:
        mat.load_table(p)
    assert info.value.line == 1


def test_wrong_column_count(tmp_path):
    p = write(tmp_path, "wavelength_um,eps_re,eps_im\n0.5,-10\n")
    with pytest.raises(mat.TableParseError):
        mat.load_table(p)


def test_round_trip(tmp_path):
    rows = [(0.4, -4.1234567891234, 0.21), (0.61, -17.5, 0.333333333333333), (1.0, -50.0, 0.6)]
    m = mat.OpticalMedium.from_rows(rows)
    p = tmp_path / "rt.csv"
    mat.save_table(m, p)
    back = mat.load_table(p)
    for w, re, im in rows:
        assert back.permittivity(w) == complex(re, im)


def test_unknown_kind_rejected():
    with pytest.raises(mat.MaterialError):
        mat.OpticalMedium(kind="lorentz")


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(st.floats(-100, 10), st.floats(0, 5)), min_size=2, max_size=8),
    st.floats(0, 1),
)
def test_interpolation_bounded_by_neighbours(values, frac):
    rows = [(0.3 + 0.1 * i, re, im) for i, (re, im) in enumerate(values)]
    m = mat.OpticalMedium.from_rows(rows)
    for w, re, im in rows:
        assert m.permittivity(w) == complex(re, im)
    i = int(frac * (len(rows) - 1) * 0.999)
    lam = rows[i][0] + frac * 0.1
    lam = min(max(lam, rows[i][0]), rows[i + 1][0])
    eps = m.permittivity(lam)
    for k, part in ((1, eps.real), (2, eps.imag)):
        lo, hi = sorted((rows[i][k], rows[i + 1][k]))
        assert lo - 1e-12 <= part <= hi + 1e-12
