"""Dataset CSV reading and writing.

Format: header ``id,<criterion names...>[,label]``, one row per
alternative, UTF-8, comma separator, dot decimals.  The trailing ``label``
column, when present, holds integer categories ``1..q``.
"""

from __future__ import annotations

import csv
import io as _io
from pathlib import Path

import numpy as np

from prefsort.core import DecisionMatrix
from prefsort.errors import InvalidInputError


def parse_dataset_csv(text: str) -> tuple[DecisionMatrix, dict[str, int] | None]:
    """Parse CSV text into a matrix and, when labelled, an id -> category map."""
    reader = csv.reader(_io.StringIO(text))
    rows = [r for r in reader if r and any(cell.strip() for cell in r)]
    if not rows:
        raise InvalidInputError("empty CSV")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0].lower() != "id":
        raise InvalidInputError("header must be 'id,<criteria...>[,label]'")
    has_label = header[-1].lower() == "label"
    names = header[1 : -1 if has_label else len(header)]
    if not names:
        raise InvalidInputError("no criterion columns found")
    if len(rows) == 1:
        raise InvalidInputError("no data rows")

    ids: list[str] = []
    perf: list[list[float]] = []
    labels: dict[str, int] = {}
    for rix, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InvalidInputError(
                f"row {rix}: expected {len(header)} cells, got {len(row)}"
            )
        aid = row[0].strip()
        if not aid:
            raise InvalidInputError(f"row {rix}: empty id")
        if aid in labels or aid in set(ids):
            raise InvalidInputError(f"row {rix}: duplicate id {aid!r}")
        vals = []
        for cix, cell in enumerate(row[1 : 1 + len(names)], start=2):
            try:
                v = float(cell)
            except ValueError:
                raise InvalidInputError(
                    f"row {rix}, column {cix} ({names[cix - 2]}): "
                    f"not a number: {cell!r}"
                ) from None
            if not np.isfinite(v):
                raise InvalidInputError(
                    f"row {rix}, column {cix}: non-finite value"
                )
            vals.append(v)
        ids.append(aid)
        perf.append(vals)
        if has_label:
            cell = row[-1].strip()
            try:
                lab = int(cell)
            except ValueError:
                raise InvalidInputError(
                    f"row {rix}: label must be an integer, got {cell!r}"
                ) from None
            if lab < 1:
                raise InvalidInputError(f"row {rix}: label must be >= 1")
            labels[aid] = lab

    matrix = DecisionMatrix(tuple(ids), np.array(perf, dtype=float), tuple(names))
    return matrix, (labels if has_label else None)


def load_dataset_csv(path: str | Path) -> tuple[DecisionMatrix, dict[str, int] | None]:
    return parse_dataset_csv(Path(path).read_text(encoding="utf-8"))


def format_dataset_csv(
    matrix: DecisionMatrix, labels: dict[str, int] | None = None
) -> str:
    """Render a matrix (optionally labelled) back to the CSV format."""
    out = _io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ["id", *matrix.criterion_names]
    if labels is not None:
        missing = [a for a in matrix.alternative_ids if a not in labels]
        if missing:
            raise InvalidInputError(f"labels missing for {missing[:3]}...")
        header.append("label")
    writer.writerow(header)
    for i, aid in enumerate(matrix.alternative_ids):
        row = [aid] + [repr(float(v)) for v in matrix.performances[i]]
        if labels is not None:
            row.append(str(labels[aid]))
        writer.writerow(row)
    return out.getvalue()


def write_dataset_csv(
    path: str | Path, matrix: DecisionMatrix, labels: dict[str, int] | None = None
) -> None:
    Path(path).write_text(format_dataset_csv(matrix, labels), encoding="utf-8")
