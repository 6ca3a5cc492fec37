"""CSV and JSON emission with a pinned schema.

Column set and order are fixed; floats are written with 17 significant
digits so a read-back is bit-exact for doubles, and reruns of a deterministic
command produce byte-identical series files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import MomentSeries
from .observables import MomentSample

CSV_COLUMNS = ("time", "m", "w", "alpha0_abs", "m_o", "m_d", "norm_error")
ANALYTIC_EXTRA_COLUMNS = ("w_lower_bound", "w_upper_bound", "w_asymptote", "m_asymptote")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_series_csv(
    path: str | Path,
    series: MomentSeries,
    extras: dict[str, np.ndarray] | None = None,
) -> None:
    """Write one moment series; `extras` appends named columns after the base set."""
    extras = extras or {}
    for name, col in extras.items():
        if len(col) != len(series):
            raise ValueError(f"extra column {name!r} has {len(col)} rows, series has {len(series)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(CSV_COLUMNS) + list(extras))
        for k, sample in enumerate(series.samples):
            row = [format_float(getattr(sample, name)) for name in CSV_COLUMNS]
            row += [format_float(extras[name][k]) for name in extras]
            writer.writerow(row)


def read_series_csv(path: str | Path) -> MomentSeries:
    """Read a series back; extra columns are ignored, missing base columns raise."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        index = {name: header.index(name) for name in CSV_COLUMNS}
        samples = []
        for row in reader:
            samples.append(
                MomentSample(**{name: float(row[index[name]]) for name in CSV_COLUMNS})
            )
    return MomentSeries(samples=tuple(samples), spec_digest="")


def write_json(path: str | Path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
