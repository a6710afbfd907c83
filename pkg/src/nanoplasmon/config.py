"""Run configuration: an INI file with one section per concern.

Example::

    [run]
    wavelength_um = 0.6
    output_dir = out
    single_sided = false

    [materials]
    host = fixed:2
    metal = fixed:-50+0.6j
    core = fixed:13

    [grids]
    k0R_min = 1e-3
    k0R_max = 1
    k0R_points = 60

Media are written as ``fixed:<complex>``, ``drude:<omega_p>,<gamma>`` (rad/s)
or ``table:<path>``. Unknown sections or keys are rejected.
"""

import configparser
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .materials import CORE_EPS, HOST_EPS, SILVER_EPS, OpticalMedium, load_table
from .outcoupler import DEFAULT_MIN_GAP


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


_SCHEMA = {
    "run": {"wavelength_um", "output_dir", "single_sided", "emit_json", "emit_csv"},
    "materials": {"host", "metal", "core"},
    "grids": {"k0R_min", "k0R_max", "k0R_points", "k0v_min", "k0v_max", "k0v_points",
              "k0a_min", "k0a_max", "k0a_points"},
    "optimizer": {"distance_rtol", "tip_seeds", "min_gap"},
}


@dataclass(frozen=True)
class LogGrid:
    lo: float
    hi: float
    points: int

    def __post_init__(self):
        if not (self.lo > 0 and self.hi >= self.lo and math.isfinite(self.hi)):
            raise ConfigError("grid bounds must satisfy 0 < lo <= hi, got %r..%r" % (self.lo, self.hi))
        if self.points < 1:
            raise ConfigError("grid needs at least one point")

    def values(self):
        if self.points == 1:
            return np.array([self.lo])
        return np.logspace(math.log10(self.lo), math.log10(self.hi), self.points)


def _fmt_complex(z):
    z = complex(z)
    return repr(z).strip("()") if z.imag else repr(z.real)


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs; immutable so it can be hashed and shared."""

    wavelength_um: float = 0.6
    host: str = "fixed:%s" % _fmt_complex(HOST_EPS)
    metal: str = "fixed:%s" % _fmt_complex(SILVER_EPS)
    core: str = "fixed:%s" % _fmt_complex(CORE_EPS)
    k0R: LogGrid = field(default_factory=lambda: LogGrid(1e-3, 1.0, 60))
    k0v: LogGrid = field(default_factory=lambda: LogGrid(1e-3, 1.0, 60))
    k0a: LogGrid = field(default_factory=lambda: LogGrid(0.2, 3.0, 60))
    distance_rtol: float = 1e-6
    tip_seeds: int = 8
    min_gap: float = DEFAULT_MIN_GAP
    output_dir: str = "nanoplasmon-out"
    single_sided: bool = False
    emit_json: bool = False
    emit_csv: bool = True

    def __post_init__(self):
        if not (self.wavelength_um > 0 and math.isfinite(self.wavelength_um)):
            raise ConfigError("wavelength_um must be positive")
        if not (0 < self.distance_rtol <= 1e-2):
            raise ConfigError("distance_rtol must lie in (0, 1e-2]")
        if self.tip_seeds < 1:
            raise ConfigError("tip_seeds must be at least 1")
        if not self.min_gap >= 0:
            raise ConfigError("min_gap must be non-negative")
        for spec in (self.host, self.metal, self.core):
            _parse_medium_spec(spec)

    # ---- media ----

    def medium(self, role):
        return _parse_medium_spec(getattr(self, role))

    def permittivities(self):
        """``(eps1, eps2, eps_core)`` at the configured wavelength."""
        wl = self.wavelength_um
        eps1 = self.medium("host").permittivity(wl)
        eps2 = self.medium("metal").permittivity(wl)
        core = self.medium("core").permittivity(wl)
        return complex(eps1), complex(eps2), float(complex(core).real)

    # ---- canonical form ----

    def to_mapping(self):
        """Nested dict of strings; feeding it back through :func:`from_mapping` is lossless."""
        b = lambda x: "true" if x else "false"
        return {
            "run": {
                "wavelength_um": repr(self.wavelength_um),
                "output_dir": self.output_dir,
                "single_sided": b(self.single_sided),
                "emit_json": b(self.emit_json),
                "emit_csv": b(self.emit_csv),
            },
            "materials": {"host": self.host, "metal": self.metal, "core": self.core},
            "grids": {
                "k0R_min": repr(self.k0R.lo), "k0R_max": repr(self.k0R.hi), "k0R_points": str(self.k0R.points),
                "k0v_min": repr(self.k0v.lo), "k0v_max": repr(self.k0v.hi), "k0v_points": str(self.k0v.points),
                "k0a_min": repr(self.k0a.lo), "k0a_max": repr(self.k0a.hi), "k0a_points": str(self.k0a.points),
            },
            "optimizer": {
                "distance_rtol": repr(self.distance_rtol),
                "tip_seeds": str(self.tip_seeds),
                "min_gap": repr(self.min_gap),
            },
        }

    def numeric_mapping(self):
        # output location and format flags do not change any number
        m = self.to_mapping()
        m["run"] = {k: v for k, v in m["run"].items() if k not in ("output_dir", "emit_json", "emit_csv")}
        return m

    def config_hash(self):
        text = json.dumps(self.numeric_mapping(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def to_ini(self):
        lines = []
        for section, items in self.to_mapping().items():
            lines.append("[%s]" % section)
            lines.extend("%s = %s" % kv for kv in items.items())
            lines.append("")
        return "\n".join(lines)


def _parse_complex(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise ConfigError("cannot parse %r as a number" % (text,)) from None


def _parse_medium_spec(spec):
    kind, sep, arg = spec.partition(":")
    if not sep:
        raise ConfigError("medium %r must look like kind:value" % (spec,))
    kind = kind.strip().lower()
    if kind == "fixed":
        return OpticalMedium.fixed(_parse_complex(arg))
    if kind == "drude":
        parts = arg.split(",")
        if len(parts) != 2:
            raise ConfigError("drude medium needs 'omega_p,gamma', got %r" % (arg,))
        return OpticalMedium.drude(float(parts[0]), float(parts[1]))
    if kind == "table":
        return load_table(arg.strip())
    raise ConfigError("unknown medium kind %r" % (kind,))


def _bool(text, key):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError("%s: expected a boolean, got %r" % (key, text))


def from_mapping(mapping):
    """Build a :class:`RunConfig` from nested ``{section: {key: str}}``."""
    for section, items in mapping.items():
        if section not in _SCHEMA:
            raise ConfigError("unknown section [%s]" % section)
        unknown = set(items) - _SCHEMA[section]
        if unknown:
            raise ConfigError("unknown key(s) in [%s]: %s" % (section, ", ".join(sorted(unknown))))
    d = RunConfig()
    run = mapping.get("run", {})
    mats = mapping.get("materials", {})
    grids = mapping.get("grids", {})
    opt = mapping.get("optimizer", {})

    def num(sec, key, default, cast=float):
        if key not in sec:
            return default
        try:
            return cast(sec[key])
        except ValueError:
            raise ConfigError("%s: cannot parse %r" % (key, sec[key])) from None

    def grid(name, default):
        return LogGrid(
            num(grids, name + "_min", default.lo),
            num(grids, name + "_max", default.hi),
            num(grids, name + "_points", default.points, int),
        )

    return RunConfig(
        wavelength_um=num(run, "wavelength_um", d.wavelength_um),
        host=mats.get("host", d.host),
        metal=mats.get("metal", d.metal),
        core=mats.get("core", d.core),
        k0R=grid("k0R", d.k0R),
        k0v=grid("k0v", d.k0v),
        k0a=grid("k0a", d.k0a),
        distance_rtol=num(opt, "distance_rtol", d.distance_rtol),
        tip_seeds=num(opt, "tip_seeds", d.tip_seeds, int),
        min_gap=num(opt, "min_gap", d.min_gap),
        output_dir=run.get("output_dir", d.output_dir),
        single_sided=_bool(run["single_sided"], "single_sided") if "single_sided" in run else d.single_sided,
        emit_json=_bool(run["emit_json"], "emit_json") if "emit_json" in run else d.emit_json,
        emit_csv=_bool(run["emit_csv"], "emit_csv") if "emit_csv" in run else d.emit_csv,
    )


def loads(text):
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case sensitive (k0R vs k0r)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    return from_mapping({s: dict(parser.items(s)) for s in parser.sections()})


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
