"""File formats: matrix CSV, curve CSVs and JSON reports, all written atomically."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from modcs.numkit import as_matrix


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_float(x: float) -> str:
    """17 significant digits: round-trips any float64 exactly."""
    return format(float(x), ".17g")


def write_matrix_csv(path, A) -> None:
    A = as_matrix(A)
    lines = [",".join(format_float(v) for v in row) for row in A]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: ragged rows")
    return as_matrix(rows)


def write_csv(path, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else format_float(v) if isinstance(v, float) else v
                         for v in row])
    atomic_write_text(path, buf.getvalue())


def write_json(path, doc) -> None:
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
