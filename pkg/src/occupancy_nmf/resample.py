"""Fixed-grid interpolation and the days-as-columns matrix embedding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta
from zoneinfo import ZoneInfo, ZoneInfoNotFoundError

import numpy as np

from .exceptions import InputError
from .ingest import RawSeries

DAY_SECONDS = 86400
DEFAULT_STEP = 600


@dataclass(frozen=True)
class GapPolicy:
    """``max_gap`` is the longest raw-sample spacing (seconds) bridged without flagging."""

    max_gap: float = math.inf


@dataclass(frozen=True)
class DayPolicy:
    min_coverage: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.min_coverage <= 1.0:
            raise InputError(f"min_coverage must lie in [0, 1], got {self.min_coverage}")


@dataclass(frozen=True, eq=False)
class GriddedSeries:
    """Counts on a per-day fixed grid.

    Day ``d`` occupies ``values[d * slots_per_day:(d + 1) * slots_per_day]``
    and its slot ``i`` sits at ``day_starts[d] + i * step`` (POSIX seconds).
    """

    site_id: str
    step: int
    values: np.ndarray
    gap_mask: np.ndarray
    day_starts: np.ndarray
    day_labels: tuple[str, ...]
    timezone: str = "UTC"

    @property
    def slots_per_day(self) -> int:
        return DAY_SECONDS // self.step

    @property
    def grid_start(self) -> float:
        return float(self.day_starts[0])

    @property
    def n_days(self) -> int:
        return len(self.day_labels)

    def instants(self) -> np.ndarray:
        offsets = np.arange(self.slots_per_day) * self.step
        return (self.day_starts[:, None] + offsets[None, :]).ravel()


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """The n x m matrix ``X`` with one column per calendar day."""

    X: np.ndarray
    day_labels: tuple[str, ...]
    step: int = DEFAULT_STEP
    site_id: str = "site"
    dropped: tuple[dict, ...] = field(default=())

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def m(self) -> int:
        return self.X.shape[1]

    def flatten(self) -> np.ndarray:
        """Back to a flat series, day by day."""
        return self.X.T.ravel()


def check_step(step) -> int:
    if step <= 0 or int(step) != step or DAY_SECONDS % int(step):
        raise InputError(f"step of {step} s must be a positive whole number of seconds dividing 86400")
    return int(step)


def _zone(name: str) -> ZoneInfo:
    try:
        return ZoneInfo(name)
    except (ZoneInfoNotFoundError, ValueError):
        raise InputError(f"unknown IANA timezone {name!r}") from None


def local_date(seconds: float, tz: ZoneInfo) -> date:
    return datetime.fromtimestamp(float(seconds), tz=tz).date()


def day_start(day: date, tz: ZoneInfo) -> float:
    """POSIX seconds of local midnight beginning ``day``."""
    return datetime(day.year, day.month, day.day, tzinfo=tz).timestamp()


def interpolate(series: RawSeries, step: int = DEFAULT_STEP, policy: GapPolicy | None = None) -> GriddedSeries:
    """Linearly interpolate ``series`` onto a grid of ``step`` seconds.

    The grid covers every local calendar day touched by the series. Slots
    before the first or after the last sample take the nearest sample's
    value. A slot is gap-masked when its bracketing samples lie more than
    ``policy.max_gap`` apart, or when it is extrapolated further than
    ``max_gap`` from the nearest sample.

    Civil days of 23 or 25 hours still get ``86400 / step`` slots starting
    at local midnight.
    """
    step = check_step(step)
    policy = policy or GapPolicy()
    if len(series) == 0:
        raise InputError("cannot interpolate an empty series")
    times, counts = series.times, series.counts
    if np.any(np.diff(times) <= 0):
        raise InputError("series must be sorted and deduplicated before interpolation")

    tz = _zone(series.timezone)
    first, last = local_date(times[0], tz), local_date(times[-1], tz)
    days = [first + timedelta(days=i) for i in range((last - first).days + 1)]
    day_starts = np.array([day_start(d, tz) for d in days])
    slots = DAY_SECONDS // step
    grid = (day_starts[:, None] + (np.arange(slots) * step)[None, :]).ravel()

    values = np.interp(grid, times, counts)

    right = np.searchsorted(times, grid, side="left")
    exact = (right < times.size) & (times[np.minimum(right, times.size - 1)] == grid)
    before = right == 0
    after = right == times.size
    inner = ~(before | after)
    spacing = np.zeros_like(grid)
    spacing[inner] = times[right[inner]] - times[right[inner] - 1]
    spacing[before] = times[0] - grid[before]
    spacing[after] = grid[after] - times[-1]
    gap_mask = (spacing > policy.max_gap) & ~exact

    return GriddedSeries(
        site_id=series.site_id,
        step=step,
        values=values,
        gap_mask=gap_mask,
        day_starts=day_starts,
        day_labels=tuple(d.isoformat() for d in days),
        timezone=series.timezone,
    )


def embed_days(grid: GriddedSeries, day_policy: DayPolicy | None = None) -> DataMatrix:
    """Stack each day's slots as a column of ``X``.

    Days with a non-masked slot fraction below ``day_policy.min_coverage``
    are dropped and listed in ``DataMatrix.dropped``.
    """
    day_policy = day_policy or DayPolicy()
    n = grid.slots_per_day
    values = grid.values.reshape(grid.n_days, n)
    coverage = 1.0 - grid.gap_mask.reshape(grid.n_days, n).mean(axis=1)
    keep = coverage >= day_policy.min_coverage
    dropped = tuple(
        {"day": label, "coverage": float(cov)}
        for label, cov, k in zip(grid.day_labels, coverage, keep)
        if not k
    )
    if not keep.any():
        raise InputError(f"no day reaches min_coverage={day_policy.min_coverage}")
    X = np.ascontiguousarray(values[keep].T)
    return DataMatrix(
        X=X,
        day_labels=tuple(l for l, k in zip(grid.day_labels, keep) if k),
        step=grid.step,
        site_id=grid.site_id,
        dropped=dropped,
    )
