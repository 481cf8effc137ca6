"""Time-indexed data model: series, missing values, lags, differences, CSV I/O.

Missing observations are stored as NaN inside float64 arrays.  NaN is never
shown to users (the report layer prints ``NA`` or ``?``) and it propagates
through arithmetic, which is exactly the NA semantics the interpreter needs.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

NA = np.nan


def isna(values):
    return np.isnan(values)


class Series:
    """A named column of observations aligned to a dataset's time index."""

    __slots__ = ("name", "values")

    def __init__(self, name, values):
        self.name = name
        self.values = np.asarray(values, dtype=float)

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return f"Series({self.name!r}, T={len(self.values)})"

    def copy(self, name=None):
        return Series(self.name if name is None else name, self.values.copy())

    def valid(self):
        return ~np.isnan(self.values)


@dataclass(frozen=True)
class SampleRange:
    """Inclusive, 1-based observation range ``first_t..last_t``."""

    first_t: int
    last_t: int

    def __post_init__(self):
        if not 1 <= self.first_t <= self.last_t:
            raise ValueError(f"invalid sample range {self.first_t}..{self.last_t}")

    @property
    def n(self):
        return self.last_t - self.first_t + 1

    @property
    def slice(self):
        return slice(self.first_t - 1, self.last_t)


@dataclass
class Dataset:
    """Ordered collection of equal-length series plus calendar metadata."""

    nobs: int
    frequency: int = 1
    start_period: int = 1
    series: dict[str, Series] = field(default_factory=dict)

    def __post_init__(self):
        if self.nobs < 0:
            raise ValueError("observation count must be non-negative")
        if self.frequency < 1:
            raise ValueError("frequency must be a positive integer")

    def __contains__(self, name):
        return name in self.series

    def __getitem__(self, name) -> Series:
        try:
            return self.series[name]
        except KeyError:
            raise DataError(f"unknown series '{name}'") from None

    def add(self, s: Series, replace=True):
        if len(s) != self.nobs:
            raise DataError(
                f"series '{s.name}' has {len(s)} observations, dataset has {self.nobs}"
            )
        if not replace and s.name in self.series:
            raise DataError(f"series '{s.name}' already exists")
        self.series[s.name] = s
        return s

    def names(self):
        return list(self.series)

    def series_id(self, name):
        """Position of a series in the dataset, counting the constant as 0."""
        return self.names().index(name) + 1

    def label(self, t):
        """Period label of 1-based observation ``t``."""
        if self.frequency == 1:
            return str(self.start_period + t - 1)
        year, sub = divmod(t - 1, self.frequency)
        return f"{self.start_period + year}:{sub + 1}"

    def range_label(self, sample: SampleRange):
        return f"{self.label(sample.first_t)}-{self.label(sample.last_t)}"


def nulldata(n):
    if n < 1:
        raise DataError("nulldata needs a positive observation count")
    return Dataset(nobs=n)


def _sniff_delimiter(header_line):
    return ";" if header_line.count(";") > header_line.count(",") else ","


def load_csv(path, delimiter=None) -> Dataset:
    """Read a header-plus-numbers CSV file into a :class:`Dataset`.

    Empty cells become NA.  When ``delimiter`` is None it is detected from the
    header row (``;`` or ``,``).  Errors name the offending file line (the
    header is line 1) and column.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise DataError(f"no such data file: {path}")
    with open(path, newline="", encoding="utf-8-sig") as fh:
        text = fh.read()
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise DataError(f"{path}: missing header row")
    if delimiter is None:
        delimiter = _sniff_delimiter(lines[0])
    rows = list(csv.reader(lines, delimiter=delimiter))
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise DataError(f"{path}: duplicate column names in header")
    for h in header:
        if not h.isidentifier():
            raise DataError(f"{path}: column name '{h}' is not a valid identifier")
    data = np.full((len(rows) - 1, len(header)), NA)
    nrows = 0
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise DataError(
                f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
            )
        for j, cell in enumerate(row):
            cell = cell.strip()
            if not cell:
                continue
            try:
                data[nrows, j] = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: row {lineno}, column '{header[j]}': "
                    f"non-numeric value {cell!r}"
                ) from None
        nrows += 1
    ds = Dataset(nobs=nrows)
    for j, name in enumerate(header):
        ds.add(Series(name, data[:nrows, j].copy()))
    return ds


def write_csv(ds: Dataset, path, delimiter=","):
    """Write every series with 17 significant digits (lossless for float64)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter=delimiter)
        w.writerow(ds.names())
        for t in range(ds.nobs):
            w.writerow(
                "" if np.isnan(s.values[t]) else f"{s.values[t]:.17g}"
                for s in ds.series.values()
            )


def gen_time(ds: Dataset) -> Series:
    if ds.nobs < 1:
        raise DataError("genr time needs at least one observation")
    return Series("time", np.arange(1, ds.nobs + 1, dtype=float))


def lag(s: Series, k: int) -> Series:
    """Shift ``s`` back ``k`` periods; the first ``k`` observations become NA."""
    n = len(s)
    if k < 1:
        raise ValueError("lag order must be at least 1")
    if k >= n:
        raise DataError(f"lag {k} of '{s.name}' needs more than {n} observations")
    out = np.full(n, NA)
    out[k:] = s.values[:-k]
    return Series(f"{s.name}_{k}", out)


def diff(s: Series) -> Series:
    n = len(s)
    if n < 2:
        raise DataError(f"cannot difference '{s.name}': fewer than 2 observations")
    out = np.full(n, NA)
    out[1:] = s.values[1:] - s.values[:-1]
    return Series(f"d_{s.name}", out)


def common_sample(series) -> SampleRange:
    """Longest contiguous run of observations where every series is non-NA.

    Ties go to the earliest run.
    """
    series = list(series)
    if not series:
        raise ValueError("common_sample needs at least one series")
    ok = np.logical_and.reduce([s.valid() for s in series])
    best_start, best_len = 0, 0
    start = None
    for t, good in enumerate(np.append(ok, False)):
        if good and start is None:
            start = t
        elif not good and start is not None:
            if t - start > best_len:
                best_start, best_len = start, t - start
            start = None
    if best_len == 0:
        names = ", ".join(s.name for s in series)
        raise DataError(f"no observations where all of {names} are available")
    return SampleRange(best_start + 1, best_start + best_len)
