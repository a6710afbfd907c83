import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nanoplasmon import config as cfgmod
from nanoplasmon import datasets as dsmod


# ---- configuration ---------------------------------------------------------------------


def test_defaults():
    c = cfgmod.RunConfig()
    assert c.k0R.points == 60 and c.k0R.lo == 1e-3 and c.k0R.hi == 1.0
    assert c.k0v.points == 60 and c.k0v.lo == 1e-3 and c.k0v.hi == 1.0
    assert c.permittivities() == (2 + 0j, complex(-50, 0.6), 13.0)
    assert not c.single_sided and c.emit_csv and not c.emit_json


def test_grid_values_are_log_spaced():
    v = cfgmod.LogGrid(1e-3, 1.0, 4).values()
    assert np.allclose(v, [1e-3, 1e-2, 1e-1, 1.0], rtol=1e-14)
    assert list(cfgmod.LogGrid(0.2, 0.2, 1).values()) == [0.2]


def test_ini_round_trip():
    c = cfgmod.loads("[run]\nsingle_sided = yes\n[grids]\nk0R_points = 7\nk0R_min = 0.01\n"
                     "[materials]\nmetal = fixed:-30+1.5j\n[optimizer]\ntip_seeds = 3\n")
    assert c.single_sided and c.k0R == cfgmod.LogGrid(0.01, 1.0, 7) and c.tip_seeds == 3
    assert c.permittivities()[1] == complex(-30, 1.5)
    back = cfgmod.loads(c.to_ini())
    assert back == c
    assert back.config_hash() == c.config_hash()


def test_load_from_file(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[grids]\nk0v_points = 5\n", encoding="utf-8")
    assert cfgmod.load(p).k0v.points == 5


@pytest.mark.parametrize(
    "text",
    [
        "[run]\ncolour = red\n",
        "[solver]\ntol = 1\n",
        "[grids]\nk0r_min = 0.1\n",  # keys are case sensitive
    ],
)
def test_unknown_keys_rejected(text):
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.loads(text)


@pytest.mark.parametrize(
    "text",
    [
        "[optimizer]\ndistance_rtol = 0.5\n",
        "[optimizer]\ndistance_rtol = 0\n",
        "[grids]\nk0R_points = 0\n",
        "[grids]\nk0R_min = -1\n",
        "[grids]\nk0R_min = 2\nk0R_max = 1\n",
        "[run]\nsingle_sided = maybe\n",
        "[run]\nwavelength_um = abc\n",
        "[materials]\nmetal = lorentz:1\n",
        "[materials]\nmetal = -50\n",
        "[materials]\nmetal = drude:1e16\n",
        "not an ini file",
    ],
)
def test_invalid_values_rejected(text):
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.loads(text)


def test_drude_and_table_media(tmp_path):
    p = tmp_path / "ag.csv"
    p.write_text("wavelength_um,eps_re,eps_im\n0.5,-40,0.5\n0.7,-60,0.7\n", encoding="utf-8")
    c = cfgmod.loads("[materials]\nmetal = table:%s\n" % p)
    assert c.permittivities()[1] == pytest.approx(complex(-50, 0.6), abs=1e-12)
    d = cfgmod.loads("[materials]\nmetal = drude:1.4e16,3e13\n")
    eps = d.permittivities()[1]
    assert eps.real < 0 < eps.imag


def test_hash_ignores_output_location_only():
    a = cfgmod.RunConfig()
    b = cfgmod.from_mapping({"run": {"output_dir": "elsewhere", "emit_json": "true"}})
    c = cfgmod.from_mapping({"optimizer": {"tip_seeds": "9"}})
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert len(a.config_hash()) == 64


# ---- datasets -------------------------------------------------------------------------------


def test_dataset_is_rectangular():
    with pytest.raises(ValueError):
        dsmod.Dataset("x", ["a", "b"], [[1.0]])
    d = dsmod.Dataset("x", ["a", "b"])
    with pytest.raises(ValueError):
        d.append([1.0, 2.0, 3.0])


def test_seventeen_digit_format():
    assert dsmod.fmt(0.1) == "0.10000000000000001"
    assert dsmod.fmt(float("nan")) == "nan" and dsmod.fmt(-math.inf) == "-inf"


def test_csv_round_trip_is_bit_exact():
    rng = np.random.default_rng(0)
    rows = [[float(x) for x in r] for r in rng.standard_normal((20, 3)) * 10.0 ** rng.integers(-300, 300, (20, 3))]
    rows.append([math.nan, math.inf, -0.0])
    meta = {"config_hash": "abc", "nested": {"k": [1, 2]}}
    d = dsmod.Dataset("curve", ["x", "y", "z"], rows, meta)
    back = dsmod.parse_csv(d.to_csv())
    assert back.name == "curve" and back.columns == d.columns and back.metadata == meta
    for r0, r1 in zip(d.rows, back.rows):
        for a, b in zip(r0, r1):
            assert (math.isnan(a) and math.isnan(b)) or (a == b and math.copysign(1, a) == math.copysign(1, b))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=6))
def test_csv_round_trip_property(values):
    d = dsmod.Dataset("p", ["c%d" % i for i in range(len(values))], [values])
    assert dsmod.parse_csv(d.to_csv()).rows == [values]


def test_write_csv_and_json(tmp_path):
    d = dsmod.Dataset("curve", ["x"], [[1.0], [math.nan]], {"h": 1})
    paths = dsmod.write([d], tmp_path, emit_csv=True, emit_json=True, run_info={"command": "t"})
    assert [p.rsplit("/", 1)[-1] for p in paths] == ["curve.csv", "datasets.json"]
    doc = json.loads(open(paths[1], encoding="utf-8").read())
    assert doc["datasets"][0]["rows"] == [[1.0], ["nan"]]
    assert doc["run_info"] == {"command": "t"}
    assert open(paths[0], encoding="utf-8").read() == d.to_csv()


def test_write_nothing(tmp_path):
    assert dsmod.write([dsmod.Dataset("a", ["x"])], tmp_path / "o", emit_csv=False) == []
