"""CSV writers with a fixed column order and 17-significant-digit floats."""
from __future__ import annotations

import csv
import io
import os

import numpy as np

ROW_COLUMNS = ("criterion", "experiment_id", "metric", "value", "tolerance", "relation", "pass")
SUMMARY_COLUMNS = ("criterion", "suite", "title", "status", "rows", "failed_rows")
TIMING_COLUMNS = ("criterion", "wall_seconds")


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, complex):
        return f"{format(v.real, '.17g')}{format(v.imag, '+.17g')}j"
    return str(v)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def serialize_rows(rows) -> bytes:
    return csv_text(ROW_COLUMNS, [r.fields() for r in rows]).encode("utf-8")


def write_csv(path, columns, rows):
    """Single writer per file; newline-normalized UTF-8."""
    data = csv_text(columns, rows).encode("utf-8")
    tmp = f"{path}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
