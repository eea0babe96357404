"""Synthetic usercount series with planted daily patterns.

The built-in ``norlin-like`` scenario has four archetypes (morning,
afternoon, late evening, constant baseline) with weekday/weekend
schedules, a three-day block of corrupted readings, and an exponential
decay of all non-baseline activity from day 47 onward.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from zoneinfo import ZoneInfo

import numpy as np

from .exceptions import InputError
from .ingest import RawSeries
from .resample import DAY_SECONDS, day_start

SLOTS = 144
STEP = DAY_SECONDS // SLOTS
SAMPLING_MODES = ("jittered", "anchored")


@dataclass(frozen=True, eq=False)
class Archetype:
    name: str
    shape: np.ndarray  # unit-L1 daily profile over SLOTS slots
    weekly_schedule: tuple[float, ...]  # Mon..Sun multipliers
    magnitude: float  # device-slots per day; constant level c needs magnitude c * SLOTS
    decays: bool = True

    def __post_init__(self):
        shape = np.asarray(self.shape, dtype=np.float64)
        if shape.shape != (SLOTS,) or np.any(shape < 0) or shape.sum() <= 0:
            raise InputError(f"archetype {self.name!r}: shape must be {SLOTS} non-negative values")
        total = shape.sum()
        # leave already-normalized shapes alone so JSON round trips are bit-exact
        if abs(total - 1.0) > 1e-12:
            shape = shape / total
        object.__setattr__(self, "shape", shape)
        if len(self.weekly_schedule) != 7 or min(self.weekly_schedule) < 0:
            raise InputError(f"archetype {self.name!r}: weekly_schedule needs 7 non-negative values")
        if self.magnitude < 0:
            raise InputError(f"archetype {self.name!r}: magnitude must be non-negative")


@dataclass(frozen=True, eq=False)
class Scenario:
    archetypes: tuple[Archetype, ...]
    n_days: int = 77
    start_date: date = date(2020, 1, 19)
    noise_sd: float = 0.0
    # (first_day, n_days) replaced wholesale by corrupt_profile
    corrupt_interval: tuple[int, int] | None = None
    corrupt_profile: np.ndarray | None = None
    # (first_day, rate): non-baseline archetypes scale by exp(-rate * (d - first_day))
    decay: tuple[int, float] | None = None
    # per-day activity of each non-baseline archetype is scaled by Uniform(1 - s, 1 + s)
    day_spread: float = 0.0
    timezone: str = "UTC"
    site_id: str = "synthetic"
    spacing_minutes: tuple[float, float] = (3.0, 12.0)
    # "jittered": i.i.d. spacings from spacing_minutes.
    # "anchored": every grid instant plus jittered extra instants, so the grid is
    # reconstructed exactly.
    sampling: str = "jittered"

    def __post_init__(self):
        if self.n_days < 1:
            raise InputError("n_days must be at least 1")
        if self.noise_sd < 0:
            raise InputError("noise_sd must be non-negative")
        if not 0 <= self.day_spread <= 1:
            raise InputError("day_spread must lie in [0, 1]")
        if not self.archetypes:
            raise InputError("a scenario needs at least one archetype")
        if self.sampling not in SAMPLING_MODES:
            raise InputError(f"sampling must be one of {SAMPLING_MODES}")
        lo, hi = self.spacing_minutes
        if not 0 < lo <= hi:
            raise InputError("spacing_minutes must satisfy 0 < low <= high")
        if self.corrupt_interval is not None:
            if self.corrupt_profile is None:
                raise InputError("corrupt_interval needs a corrupt_profile")
            profile = np.asarray(self.corrupt_profile, dtype=np.float64)
            if profile.shape != (SLOTS,) or np.any(profile < 0):
                raise InputError(f"corrupt_profile must be {SLOTS} non-negative values")
            object.__setattr__(self, "corrupt_profile", profile)

    @property
    def corrupt_days(self) -> list[int]:
        if self.corrupt_interval is None:
            return []
        first, count = self.corrupt_interval
        return [d for d in range(first, first + count) if 0 <= d < self.n_days]

    def day_labels(self) -> list[str]:
        return [(self.start_date + timedelta(days=d)).isoformat() for d in range(self.n_days)]


def raised_cosine(start_hour: float, end_hour: float) -> np.ndarray:
    """Smooth bump over [start_hour, end_hour), zero elsewhere."""
    t = (np.arange(SLOTS) + 0.5) * 24 / SLOTS
    phase = (t - start_hour) / (end_hour - start_hour)
    bump = np.where((phase > 0) & (phase < 1), 0.5 - 0.5 * np.cos(2 * np.pi * phase), 0.0)
    return bump / bump.sum()


def norlin_like(
    noise_fraction: float = 0.0,
    corrupt: bool = True,
    decay: bool = True,
    baseline_devices: float = 20.0,
    sampling: str = "jittered",
    day_spread: float = 0.8,
    peaks: tuple[float, float, float] = (300.0, 250.0, 150.0),
) -> Scenario:
    """Four-archetype scenario shaped after a spring-term campus library.

    ``noise_fraction`` sets the noise standard deviation relative to the
    peak of the noiseless series before day-to-day spread is applied.
    ``peaks`` are the typical maximum device counts of the AM, PM and Late
    patterns on a full-activity day.
    """
    weekdays = (1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0)
    archetypes = (
        Archetype("AM", raised_cosine(7, 13), weekdays, magnitude=peaks[0] * 18),
        Archetype("PM", raised_cosine(12, 19.5), (1.0, 1.0, 1.0, 1.0, 0.9, 0.5, 0.6), magnitude=peaks[1] * 22.5),
        Archetype("Late", raised_cosine(18, 24), (1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0), magnitude=peaks[2] * 18),
        Archetype("Baseline", np.ones(SLOTS), (1.0,) * 7, magnitude=baseline_devices * SLOTS, decays=False),
    )
    # readings stuck around 3x baseline and flapping with a 2 h period
    slots = np.arange(SLOTS)
    flapping = 3 * baseline_devices + 15.0 * np.where((slots // 6) % 2 == 0, 1.0, -1.0)
    scenario = Scenario(
        archetypes=archetypes,
        n_days=77,
        start_date=date(2020, 1, 19),
        corrupt_interval=(42, 3) if corrupt else None,
        corrupt_profile=flapping if corrupt else None,
        decay=(47, 0.15) if decay else None,
        site_id="norlin-like",
        sampling=sampling,
    )
    if noise_fraction:
        peak = float(planted_matrix(scenario).max())
    scenario = replace(scenario, day_spread=day_spread)
    if noise_fraction:
        scenario = replace(scenario, noise_sd=noise_fraction * peak)
    return scenario


SCENARIOS = {"norlin-like": norlin_like}


def _streams(seed: int):
    # independent generators for day-to-day activity and for sampling/noise
    activity, sampling = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(activity), np.random.default_rng(sampling)


def planted_factors(scenario: Scenario, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Ground-truth ``W`` (SLOTS x archetypes, unit-L1 columns) and ``H`` (archetypes x days).

    ``seed`` only matters when ``scenario.day_spread > 0``. Corrupted days
    are not represented here; see :func:`planted_matrix`.
    """
    W = np.column_stack([a.shape for a in scenario.archetypes])
    H = np.zeros((len(scenario.archetypes), scenario.n_days))
    for d in range(scenario.n_days):
        weekday = (scenario.start_date + timedelta(days=d)).weekday()
        for j, a in enumerate(scenario.archetypes):
            level = a.magnitude * a.weekly_schedule[weekday]
            if a.decays and scenario.decay is not None:
                first, rate = scenario.decay
                if d > first:
                    level *= np.exp(-rate * (d - first))
            H[j, d] = level
    if scenario.day_spread > 0:
        rng, _ = _streams(seed)
        s = scenario.day_spread
        spread = rng.uniform(1 - s, 1 + s, H.shape)
        decays = np.array([a.decays for a in scenario.archetypes])
        H[decays] *= spread[decays]
    return W, H


def planted_matrix(scenario: Scenario, seed: int = 0) -> np.ndarray:
    """Noiseless SLOTS x n_days matrix, corrupted days included."""
    W, H = planted_factors(scenario, seed)
    X = W @ H
    for d in scenario.corrupt_days:
        X[:, d] = scenario.corrupt_profile
    return X


def _sample_instants(scenario: Scenario, starts: np.ndarray, rng) -> np.ndarray:
    lo, hi = (60 * s for s in scenario.spacing_minutes)
    if scenario.sampling == "anchored":
        grid = (starts[:, None] + (np.arange(SLOTS) * STEP)[None, :]).ravel()
        extra_lo, extra_hi = lo, max(lo, STEP - lo)
        extra = grid + np.round(rng.uniform(extra_lo, extra_hi, grid.size))
        keep = rng.random(grid.size) < 0.5
        return np.sort(np.concatenate([grid, extra[keep]]))
    first = starts[0]
    last = starts[-1] + (SLOTS - 1) * STEP
    # enough draws to cover the span at the shortest spacing
    n = int(np.ceil((last - first) / lo)) + 2
    steps = np.round(rng.uniform(lo, hi, n))
    times = first + np.concatenate([[0.0], np.cumsum(steps)])
    times = times[times < last]
    return np.append(times, last)


def generate(scenario: Scenario, seed: int = 0) -> RawSeries:
    """Draw an irregularly sampled series from ``scenario``.

    ``seed`` drives the day-to-day activity spread, the sampling instants
    and the noise, each from its own stream. The noiseless grid signal is
    evaluated at the sample instants by linear interpolation; Gaussian noise
    is then added per sample and clipped at 0.
    """
    _, rng = _streams(seed)
    tz = ZoneInfo(scenario.timezone)
    days = [scenario.start_date + timedelta(days=d) for d in range(scenario.n_days)]
    starts = np.array([day_start(d, tz) for d in days])
    grid = (starts[:, None] + (np.arange(SLOTS) * STEP)[None, :]).ravel()
    truth = planted_matrix(scenario, seed).T.ravel()

    times = _sample_instants(scenario, starts, rng)
    counts = np.interp(times, grid, truth)
    if scenario.noise_sd > 0:
        counts = np.maximum(counts + rng.normal(0.0, scenario.noise_sd, counts.size), 0.0)
    return RawSeries(site_id=scenario.site_id, times=times, counts=counts, timezone=scenario.timezone)


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a scenario from its JSON form (see :func:`scenario_to_dict`)."""
    try:
        archetypes = tuple(
            Archetype(
                name=a["name"],
                shape=np.asarray(a["shape"], dtype=np.float64),
                weekly_schedule=tuple(a["weekly_schedule"]),
                magnitude=float(a["magnitude"]),
                decays=bool(a.get("decays", True)),
            )
            for a in doc["archetypes"]
        )
        kwargs = dict(
            archetypes=archetypes,
            n_days=int(doc.get("n_days", 77)),
            start_date=date.fromisoformat(doc.get("start_date", "2020-01-19")),
            noise_sd=float(doc.get("noise_sd", 0.0)),
            day_spread=float(doc.get("day_spread", 0.0)),
            timezone=doc.get("timezone", "UTC"),
            site_id=doc.get("site_id", "synthetic"),
            sampling=doc.get("sampling", "jittered"),
        )
        if doc.get("spacing_minutes") is not None:
            kwargs["spacing_minutes"] = tuple(doc["spacing_minutes"])
        if doc.get("corrupt_interval") is not None:
            kwargs["corrupt_interval"] = tuple(doc["corrupt_interval"])
            kwargs["corrupt_profile"] = np.asarray(doc["corrupt_profile"], dtype=np.float64)
        if doc.get("decay") is not None:
            kwargs["decay"] = (int(doc["decay"][0]), float(doc["decay"][1]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"invalid scenario: {exc}") from None
    return Scenario(**kwargs)


def scenario_to_dict(scenario: Scenario) -> dict:
    return {
        "schema": 1,
        "archetypes": [
            {
                "name": a.name,
                "shape": a.shape.tolist(),
                "weekly_schedule": list(a.weekly_schedule),
                "magnitude": a.magnitude,
                "decays": a.decays,
            }
            for a in scenario.archetypes
        ],
        "n_days": scenario.n_days,
        "start_date": scenario.start_date.isoformat(),
        "noise_sd": scenario.noise_sd,
        "day_spread": scenario.day_spread,
        "corrupt_interval": list(scenario.corrupt_interval) if scenario.corrupt_interval else None,
        "corrupt_profile": scenario.corrupt_profile.tolist() if scenario.corrupt_profile is not None else None,
        "decay": list(scenario.decay) if scenario.decay else None,
        "timezone": scenario.timezone,
        "site_id": scenario.site_id,
        "spacing_minutes": list(scenario.spacing_minutes),
        "sampling": scenario.sampling,
    }


def load_scenario(name_or_path: str) -> Scenario:
    if name_or_path in SCENARIOS:
        return SCENARIOS[name_or_path]()
    try:
        with open(name_or_path, encoding="utf-8") as fh:
            return scenario_from_dict(json.load(fh))
    except FileNotFoundError:
        raise InputError(
            f"unknown scenario {name_or_path!r}: not a built-in ({', '.join(SCENARIOS)}) or a file",
            path=name_or_path,
        ) from None
    except json.JSONDecodeError as exc:
        raise InputError(f"scenario file is not valid JSON: {exc}", path=name_or_path) from None
