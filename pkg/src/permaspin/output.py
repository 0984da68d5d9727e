"""Deterministic CSV/JSON emission for tables."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence, TextIO

import numpy as np

HEADER = "# permaspin-lab v1"


def fmt(x) -> str:
    """Round-trip text for a cell: floats get 17 significant digits."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    if isinstance(x, np.floating):
        return fmt(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def write_csv(columns: Sequence[str], rows: Iterable[Sequence], out: TextIO) -> None:
    out.write(HEADER + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return fmt(x)
    if hasattr(x, "item"):
        return _jsonable(x.item())
    return x


def write_json(obj, out: TextIO) -> None:
    json.dump(obj, out, indent=2, sort_keys=True, default=_jsonable)
    out.write("\n")


def write_table(columns: Sequence[str], rows: Iterable[Sequence], out: TextIO, fmt_name: str = "csv") -> None:
    if fmt_name == "csv":
        write_csv(columns, rows, out)
    elif fmt_name == "json":
        recs = [{c: _jsonable(v) for c, v in zip(columns, row)} for row in rows]
        write_json({"version": HEADER[2:], "columns": list(columns), "rows": recs}, out)
    else:
        raise ValueError(f"unknown format {fmt_name!r}")


def read_csv(text: str) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(lines))))
    return rows[0], rows[1:]
