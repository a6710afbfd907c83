"""Complex relative permittivities of the media in the model.

Time dependence is ``exp(-i omega t)`` everywhere, so a lossy passive medium
has ``Im eps > 0``. A medium is fixed, Drude-like, or tabulated against vacuum
wavelength in micrometres. Tables interpolate linearly in wavelength, real and
imaginary parts separately.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

# speed of light in um/s, so that omega = 2 pi c / lambda0 with lambda0 in um
SPEED_OF_LIGHT_UM = 2.99792458e14

TABLE_HEADER = ("wavelength_um", "eps_re", "eps_im")

SILVER_EPS = complex(-50.0, 0.6)
HOST_EPS = 2.0
CORE_EPS = 13.0


class MaterialError(ValueError):
    """Base class for material specification problems."""


class TableParseError(MaterialError):
    def __init__(self, path, line, message):
        super().__init__("%s:%d: %s" % (path, line, message))
        self.path = path
        self.line = line


class NonMonotoneTableError(MaterialError):
    """Wavelength column is not strictly increasing."""


class WavelengthRangeError(MaterialError):
    """Requested wavelength lies outside a table's range."""


@dataclass(frozen=True)
class OpticalMedium:
    """Immutable permittivity source.

    Use the ``fixed``, ``drude`` and ``from_rows`` constructors rather than
    filling the fields by hand.
    """

    kind: str
    fixed_eps: complex = 0j
    plasma_freq: float = 0.0
    damping: float = 0.0
    table: tuple = field(default=())
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("fixed", "drude", "table"):
            raise MaterialError("unknown medium kind %r" % (self.kind,))
        if self.kind == "drude" and (self.plasma_freq <= 0 or self.damping < 0):
            raise MaterialError("drude medium needs plasma_freq > 0 and damping >= 0")
        if self.kind == "table":
            if len(self.table) < 2:
                raise MaterialError("a table medium needs at least two rows")
            wl = [row[0] for row in self.table]
            for i in range(1, len(wl)):
                if not wl[i] > wl[i - 1]:
                    raise NonMonotoneTableError(
                        "wavelengths must be strictly increasing (row %d: %r after %r)"
                        % (i + 1, wl[i], wl[i - 1])
                    )

    @classmethod
    def fixed(cls, eps, name=""):
        return cls(kind="fixed", fixed_eps=complex(eps), name=name)

    @classmethod
    def drude(cls, plasma_freq, damping, name=""):
        return cls(kind="drude", plasma_freq=float(plasma_freq), damping=float(damping), name=name)

    @classmethod
    def from_rows(cls, rows, name=""):
        rows = tuple((float(w), float(re), float(im)) for w, re, im in rows)
        return cls(kind="table", table=rows, name=name)

    def permittivity(self, lambda0):
        return permittivity(self, lambda0)


def silver_default():
    return OpticalMedium.fixed(SILVER_EPS, name="silver")


def host_default():
    return OpticalMedium.fixed(HOST_EPS, name="host")


def core_default():
    return OpticalMedium.fixed(CORE_EPS, name="core")


def permittivity(medium, lambda0):
    """Relative permittivity of ``medium`` at vacuum wavelength ``lambda0``.

    Parameters
    ----------
    medium : OpticalMedium
    lambda0 : float
        Vacuum wavelength in micrometres, strictly positive.

    Returns
    -------
    complex

    Raises
    ------
    WavelengthRangeError
        For a table medium queried outside its tabulated range.
    """
    lambda0 = float(lambda0)
    if not (lambda0 > 0 and math.isfinite(lambda0)):
        raise MaterialError("wavelength must be positive and finite, got %r" % (lambda0,))
    if medium.kind == "fixed":
        return medium.fixed_eps
    if medium.kind == "drude":
        omega = 2.0 * math.pi * SPEED_OF_LIGHT_UM / lambda0
        wp, gamma = medium.plasma_freq, medium.damping
        return 1.0 - wp * wp / complex(omega * omega, gamma * omega)
    wl = np.array([row[0] for row in medium.table])
    if lambda0 < wl[0] or lambda0 > wl[-1]:
        raise WavelengthRangeError(
            "wavelength %g um outside table range [%g, %g]" % (lambda0, wl[0], wl[-1])
        )
    re = np.interp(lambda0, wl, [row[1] for row in medium.table])
    im = np.interp(lambda0, wl, [row[2] for row in medium.table])
    return complex(float(re), float(im))


def load_table(path, name=None):
    """Read a ``wavelength_um,eps_re,eps_im`` CSV file into a table medium.

    Blank lines and lines starting with ``#`` are skipped. Errors report the
    1-based line number of the offending line.
    """
    rows = []
    header_seen = False
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            cells = [c.strip() for c in next(csv.reader([stripped]))]
            if not header_seen:
                if tuple(cells) != TABLE_HEADER:
                    raise TableParseError(path, lineno, "expected header %s" % ",".join(TABLE_HEADER))
                header_seen = True
                continue
            if len(cells) != 3:
                raise TableParseError(path, lineno, "expected 3 columns, found %d" % len(cells))
            try:
                values = tuple(float(c) for c in cells)
            except ValueError as exc:
                raise TableParseError(path, lineno, str(exc)) from None
            if not all(math.isfinite(v) for v in values):
                raise TableParseError(path, lineno, "non-finite value")
            if rows and not values[0] > rows[-1][0]:
                raise NonMonotoneTableError(
                    "%s:%d: wavelength %r does not increase past %r" % (path, lineno, values[0], rows[-1][0])
                )
            rows.append(values)
    if not header_seen:
        raise TableParseError(path, 1, "missing header")
    return OpticalMedium.from_rows(rows, name=name if name is not None else str(path))


def save_table(medium, path):
    """Write a table medium in the format :func:`load_table` reads."""
    if medium.kind != "table":
        raise MaterialError("only table media can be saved")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(TABLE_HEADER) + "\n")
        for w, re, im in medium.table:
            fh.write("%s,%s,%s\n" % (repr(w), repr(re), repr(im)))
