"""Paired response/covariate data and CSV ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyInput,
    MissingColumn,
    NonFiniteValue,
    NonNumericCell,
    RowCountTooSmall,
    ShapeMismatch,
)


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim == 1:
        arr = arr[:, None]
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ObservationSet:
    """Responses ``y`` (n x d) paired with covariates ``x`` (n x q).

    Arrays are copied and made read-only on construction.
    """

    y: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        y = _frozen(self.y)
        x = _frozen(self.x)
        if y.ndim != 2 or x.ndim != 2:
            raise ShapeMismatch("y and x must be two-dimensional")
        if y.shape[0] != x.shape[0]:
            raise ShapeMismatch(f"y has {y.shape[0]} rows but x has {x.shape[0]}")
        if y.shape[0] < 2:
            raise RowCountTooSmall(f"need at least 2 rows, got {y.shape[0]}")
        if y.shape[1] < 2:
            raise ShapeMismatch(f"need d >= 2 response columns, got {y.shape[1]}")
        if x.shape[1] < 1:
            raise ShapeMismatch("need q >= 1 covariate columns")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise NonFiniteValue("observation set contains NaN or infinite values")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.y.shape[1]

    @property
    def q(self) -> int:
        return self.x.shape[1]

    def column_names(self) -> list[str]:
        return [f"y{j + 1}" for j in range(self.d)] + [f"x{k + 1}" for k in range(self.q)]


def load_csv(path, d: int, q: int) -> ObservationSet:
    """Read ``y1..yd, x1..xq`` by header name from a comma-separated file.

    Extra columns are ignored. Rows keep file order.
    """
    if d < 2 or q < 1:
        raise ShapeMismatch(f"need d >= 2 and q >= 1, got d={d}, q={q}")
    wanted = [f"y{j + 1}" for j in range(d)] + [f"x{k + 1}" for k in range(q)]
    try:
        fh = Path(path).open(newline="", encoding="utf-8")
    except OSError as exc:
        raise EmptyInput(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise MissingColumn(f"{path}: empty file, no header row") from None
        missing = [name for name in wanted if name not in header]
        if missing:
            raise MissingColumn(f"{path}: missing column(s) {', '.join(missing)}")
        idx = [header.index(name) for name in wanted]
        rows = []
        for lineno, record in enumerate(reader, start=1):
            if not record or all(not cell.strip() for cell in record):
                continue
            values = []
            for name, k in zip(wanted, idx):
                cell = record[k].strip() if k < len(record) else ""
                try:
                    v = float(cell)
                except ValueError:
                    raise NonNumericCell(lineno, name, cell) from None
                if not math.isfinite(v):
                    raise NonFiniteValue(f"row {lineno}, column {name!r}: {cell!r}")
                values.append(v)
            rows.append(values)
    if len(rows) < 2:
        raise RowCountTooSmall(f"{path}: need at least 2 data rows, got {len(rows)}")
    table = np.array(rows, dtype=np.float64)
    return ObservationSet(y=table[:, :d], x=table[:, d:])


def save_csv(data: ObservationSet, path) -> None:
    """Write ``data`` with a header; ``repr`` keeps full float64 precision."""
    table = np.hstack([data.y, data.x])
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(data.column_names())
        for row in table:
            writer.writerow([repr(float(v)) for v in row])
