"""Plot-ready datasets and their CSV / JSON serialisation.

Numbers are written with 17 significant digits so a value read back is the
same double that was written. The CSV preamble and the JSON document carry
the same metadata. The wall-clock timestamp goes only into the JSON
``run_info`` block, so CSV files of identical runs are byte-identical.
"""

import json
import math
import os
from dataclasses import dataclass, field


def fmt(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _json_number(x):
    x = float(x)
    return x if math.isfinite(x) else fmt(x)


@dataclass
class Dataset:
    """A rectangular table of reals with a metadata block."""

    name: str
    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        self.rows = [list(map(float, r)) for r in self.rows]
        for r in self.rows:
            self._check_row(r)

    def _check_row(self, row):
        if len(row) != len(self.columns):
            raise ValueError("row has %d values, dataset %r has %d columns" % (len(row), self.name, len(self.columns)))

    def append(self, row):
        row = list(map(float, row))
        self._check_row(row)
        self.rows.append(row)

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def to_csv(self):
        lines = ["# dataset: %s" % self.name]
        for key in sorted(self.metadata):
            lines.append("# %s: %s" % (key, json.dumps(self.metadata[key], sort_keys=True)))
        lines.append(",".join(self.columns))
        lines.extend(",".join(fmt(v) for v in r) for r in self.rows)
        return "\n".join(lines) + "\n"

    def to_dict(self):
        return {
            "name": self.name,
            "columns": self.columns,
            "rows": [[_json_number(v) for v in r] for r in self.rows],
            "metadata": self.metadata,
        }


def parse_csv(text):
    """Inverse of :meth:`Dataset.to_csv`."""
    meta, name, header, rows = {}, None, None, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, val = line[2:].partition(": ")
            if key == "dataset":
                name = val
            else:
                meta[key] = json.loads(val)
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append([float(v) for v in line.split(",")])
    return Dataset(name, header, rows, meta)


def document(datasets, run_info=None):
    """One JSON document mirroring all datasets."""
    return json.dumps(
        {"datasets": [d.to_dict() for d in datasets], "run_info": run_info or {}},
        indent=1,
        sort_keys=True,
    )


def write(datasets, out_dir, emit_csv=True, emit_json=False, run_info=None, json_name="datasets.json"):
    """Write one CSV per dataset and optionally a JSON document; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    if emit_csv:
        for d in datasets:
            p = os.path.join(out_dir, d.name + ".csv")
            with open(p, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(d.to_csv())
            paths.append(p)
    if emit_json:
        p = os.path.join(out_dir, json_name)
        with open(p, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(document(datasets, run_info))
        paths.append(p)
    return paths
