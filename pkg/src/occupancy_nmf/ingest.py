"""Reading timestamped usercount exports into a :class:`RawSeries`.

Input is a CSV with a header row naming a ``timestamp`` column (RFC 3339)
and a ``count`` column. Other columns are ignored, so identity-bearing
fields in an export never reach the pipeline.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import BinaryIO, Iterator, Literal

import numpy as np

from .exceptions import InputError

logger = logging.getLogger(__name__)

DedupePolicy = Literal["mean", "max", "first"]
DEDUPE_POLICIES = ("mean", "max", "first")


@dataclass(frozen=True)
class RawSample:
    timestamp: datetime
    count: float


@dataclass(frozen=True)
class Rejection:
    line: int
    reason: str


@dataclass(frozen=True)
class IngestOptions:
    timestamp_column: str = "timestamp"
    count_column: str = "count"
    site_id: str = "site"
    timezone: str = "UTC"
    # accept offset-less timestamps and read them as UTC
    assume_utc: bool = False
    # treat rows with count == 0 as missing data rather than true zeros
    zeros_as_gaps: bool = False


@dataclass(frozen=True, eq=False)
class RawSeries:
    """Irregularly sampled counts for one site.

    ``times`` holds POSIX seconds (UTC) and ``counts`` the matching values.
    ``timezone`` is the IANA zone used later to cut the series into days.
    """

    site_id: str
    times: np.ndarray
    counts: np.ndarray
    timezone: str = "UTC"
    rejections: tuple[Rejection, ...] = field(default=())

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        counts = np.asarray(self.counts, dtype=np.float64)
        if times.shape != counts.shape or times.ndim != 1:
            raise InputError("times and counts must be 1-d arrays of equal length")
        times.flags.writeable = False
        counts.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "counts", counts)

    def __len__(self):
        return self.times.shape[0]

    def __iter__(self) -> Iterator[RawSample]:
        for t, c in zip(self.times, self.counts):
            yield RawSample(datetime.fromtimestamp(float(t), tz=timezone.utc), float(c))

    def __eq__(self, other):
        if not isinstance(other, RawSeries):
            return NotImplemented
        return (
            self.site_id == other.site_id
            and self.timezone == other.timezone
            and self.rejections == other.rejections
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.counts, other.counts)
        )

    @property
    def samples(self) -> list[RawSample]:
        return list(self)

    @property
    def n_rejected(self) -> int:
        return len(self.rejections)


def parse_timestamp(text: str, assume_utc: bool = False) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime.

    Raises ``ValueError`` for unparseable text and for timestamps without an
    offset unless ``assume_utc`` is set.
    """
    text = text.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        if not assume_utc:
            raise ValueError(f"timestamp {text!r} has no UTC offset")
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(seconds: float) -> str:
    dt = datetime.fromtimestamp(float(seconds), tz=timezone.utc)
    return dt.isoformat(timespec="seconds").replace("+00:00", "Z")


def parse_csv(stream: BinaryIO, options: IngestOptions | None = None) -> RawSeries:
    """Parse a byte stream of CSV rows into a sorted :class:`RawSeries`.

    Rows with a bad timestamp, a non-numeric, non-finite or negative count
    are rejected and recorded in ``RawSeries.rejections``. Duplicate
    timestamps are kept; use :func:`dedupe` to resolve them.
    """
    options = options or IngestOptions()
    text = io.TextIOWrapper(stream, encoding="utf-8-sig", newline="")
    reader = csv.reader(text)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise InputError("empty input: no header row") from None
    except UnicodeDecodeError as exc:
        raise InputError(f"input is not UTF-8: {exc}") from None
    try:
        t_col = header.index(options.timestamp_column)
        c_col = header.index(options.count_column)
    except ValueError:
        raise InputError(
            f"malformed header {header!r}: expected columns "
            f"{options.timestamp_column!r} and {options.count_column!r}"
        ) from None

    times, counts, rejections = [], [], []
    for line, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) <= max(t_col, c_col):
            rejections.append(Rejection(line, "missing fields"))
            continue
        try:
            ts = parse_timestamp(row[t_col], options.assume_utc)
        except ValueError as exc:
            if "no UTC offset" in str(exc):
                raise InputError(
                    f"line {line}: {exc}; pass assume_utc to read naive timestamps as UTC"
                ) from None
            rejections.append(Rejection(line, f"unparseable timestamp {row[t_col]!r}"))
            continue
        try:
            count = float(row[c_col])
        except ValueError:
            rejections.append(Rejection(line, f"unparseable count {row[c_col]!r}"))
            continue
        if not np.isfinite(count):
            rejections.append(Rejection(line, f"non-finite count {row[c_col]!r}"))
            continue
        if count < 0:
            rejections.append(Rejection(line, f"negative count {count!r}"))
            continue
        if options.zeros_as_gaps and count == 0:
            rejections.append(Rejection(line, "zero count treated as gap"))
            continue
        times.append(ts.timestamp())
        counts.append(count)

    for r in rejections:
        logger.warning("rejected row at line %d: %s", r.line, r.reason)
    if not times:
        raise InputError(f"no valid rows after filtering ({len(rejections)} rejected)")

    times = np.asarray(times)
    counts = np.asarray(counts)
    # stable sort keeps file order among duplicate timestamps ("first" policy relies on it)
    order = np.argsort(times, kind="stable")
    return RawSeries(
        site_id=options.site_id,
        times=times[order],
        counts=counts[order],
        timezone=options.timezone,
        rejections=tuple(rejections),
    )


def read_csv(path, options: IngestOptions | None = None) -> RawSeries:
    with open(path, "rb") as fh:
        return parse_csv(fh, options)


def dedupe(series: RawSeries, policy: DedupePolicy = "mean") -> RawSeries:
    """Collapse samples sharing a timestamp into one, chosen by ``policy``."""
    if policy not in DEDUPE_POLICIES:
        raise InputError(f"unknown dedupe policy {policy!r}; expected one of {DEDUPE_POLICIES}")
    times = series.times
    if times.size < 2 or np.all(np.diff(times) > 0):
        return series
    uniq, start, sizes = np.unique(times, return_index=True, return_counts=True)
    if policy == "first":
        counts = series.counts[start]
    elif policy == "max":
        counts = np.maximum.reduceat(series.counts, start)
    else:
        counts = np.add.reduceat(series.counts, start) / sizes
    return replace(series, times=uniq, counts=counts)


def write_csv(series: RawSeries, stream) -> None:
    """Write a series as ``timestamp,count`` rows to a text stream."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["timestamp", "count"])
    for t, c in zip(series.times, series.counts):
        writer.writerow([format_timestamp(t), format(float(c), ".17g")])
