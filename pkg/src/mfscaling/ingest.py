"""Delimited-text loading and increment preparation."""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import TimeSeries

# decimal point only; no thousands separators, underscores, nan or inf
_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")

INCREMENT_MODES = ("diff", "log_return", "demeaned_diff")


@dataclass(frozen=True)
class ColumnSpec:
    column: Union[str, int] = 0
    timestamp_column: Optional[Union[str, int]] = None
    delimiter: str = ","
    has_header: bool = True

    def __post_init__(self):
        if len(self.delimiter) != 1 or not (self.delimiter.isprintable()
                                            or self.delimiter == "\t"):
            raise ValueError("delimiter must be a single printable character")
        if isinstance(self.column, str) and not self.has_header:
            raise ValueError("column names need a header row")


@dataclass(frozen=True)
class LoadResult:
    series: TimeSeries
    dropped: int
    dropped_rows: tuple


def _parse(token: str) -> Optional[float]:
    token = token.strip()
    if not _NUMBER.match(token):
        return None
    value = float(token)
    return value if np.isfinite(value) else None


def _resolve(column, header):
    if isinstance(column, int):
        if column < 0 or (header is not None and column >= len(header)):
            raise KeyError("column index %d out of range" % column)
        return column
    if header is None or column not in header:
        raise KeyError("column %r not found" % (column,))
    return header.index(column)


def load_series(path, spec: ColumnSpec = ColumnSpec(), tick_lag: float = 1.0,
                tick_unit: str = "tick", min_length: int = 16) -> LoadResult:
    """Read one numeric column of a delimited file into a :class:`TimeSeries`.

    Rows whose value does not parse as a finite decimal number are dropped and
    reported in the result; no interpolation is done and timestamps are only
    validated for presence, never used to re-grid.
    """
    values, dropped = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=spec.delimiter)
        header = None
        if spec.has_header:
            header = [h.strip() for h in next(reader, [])]
        col = _resolve(spec.column, header)
        if spec.timestamp_column is not None:
            _resolve(spec.timestamp_column, header)
        for lineno, row in enumerate(reader, start=2 if spec.has_header else 1):
            if not row or all(not c.strip() for c in row):
                continue
            v = _parse(row[col]) if col < len(row) else None
            if v is None:
                dropped.append(lineno)
            else:
                values.append(v)
    if len(values) < min_length:
        raise ValueError("series too short: %d valid rows (need %d)"
                         % (len(values), min_length))
    label = str(spec.column)
    return LoadResult(TimeSeries(np.array(values), tick_lag, tick_unit, label),
                      len(dropped), tuple(dropped))


def to_increments(series: TimeSeries, mode: str = "diff") -> TimeSeries:
    """Increments of a level series; output is one sample shorter."""
    x = series.values
    if x.size < 2:
        raise ValueError("need at least 2 values to form increments")
    if mode == "diff":
        y = np.diff(x)
    elif mode == "log_return":
        bad = np.flatnonzero(x <= 0)
        if bad.size:
            raise ValueError("log_return needs positive values; index %d is %r"
                             % (bad[0], x[bad[0]]))
        y = np.log(x[1:] / x[:-1])
    elif mode == "demeaned_diff":
        y = np.diff(x)
        y = y - y.mean()
    else:
        raise ValueError("unknown increment mode %r" % mode)
    return series.replace(y, label=f"{series.label}:{mode}".lstrip(":"))
