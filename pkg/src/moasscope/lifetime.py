"""Gap-tolerant MOAS lifetimes, observability, and knee-point detection.

The sensitivity threshold S is the maximum number of consecutive missing
days bridged when building lifetime segments: with S=1, one missing day
inside an otherwise continuous run does not end the run.  Lifetime is
the calendar span of the longest (bridged) segment, not the count of
observed days.

Observability is the number of observed MOAS days divided by the span
between the first and last observation, inclusive, so a prefix seen on a
single day has observability 1.0 by definition.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Sequence

import numpy as np

from .moas import MoasTimeline
from .records import IpPrefix

SHORT_LIVED = "ShortLived"
LONG_LIVED = "LongLived"

DEFAULT_THRESHOLD_DAYS = 30
DEFAULT_CAP_DAYS = 365
DEFAULT_KNEEDLE_SENSITIVITY = 1.0

_FLAT_EPS = 1e-9


class NoKneeError(ValueError):
    """The curve has no detectable knee (flat or never above its chord)."""


@dataclass(frozen=True)
class KneeConfig:
    cap_days: int = DEFAULT_CAP_DAYS
    kneedle_sensitivity: float = DEFAULT_KNEEDLE_SENSITIVITY

    def __post_init__(self):
        if self.cap_days < 2:
            raise ValueError("cap_days must be >= 2")
        if self.kneedle_sensitivity <= 0:
            raise ValueError("kneedle_sensitivity must be positive")


@dataclass(frozen=True)
class LifetimeResult:
    prefix: IpPrefix
    first_day: date
    last_day: date
    segments: tuple[tuple[date, date], ...]
    max_lifetime_days: int
    observability: float
    longevity: str

    @property
    def n_segments(self) -> int:
        return len(self.segments)


def merge_day_runs(days: Iterable[int], sensitivity: int) -> list[tuple[int, int]]:
    """Merge sorted day numbers into closed intervals, bridging gaps <= sensitivity.

    Returns disjoint [first, last] intervals separated by more than
    ``sensitivity`` missing days.
    """
    if sensitivity < 0:
        raise ValueError("sensitivity must be >= 0")
    ordered = sorted(set(days))
    if not ordered:
        raise ValueError("empty day set")
    runs: list[tuple[int, int]] = []
    start = prev = ordered[0]
    for day in ordered[1:]:
        if day - prev - 1 > sensitivity:
            runs.append((start, prev))
            start = day
        prev = day
    runs.append((start, prev))
    return runs


def _timeline_ordinals(timeline: MoasTimeline) -> list[int]:
    if not timeline.days:
        raise ValueError(f"timeline for {timeline.prefix} has no MOAS days")
    return [d.toordinal() for d in timeline.days]


def segments(timeline: MoasTimeline, sensitivity: int) -> list[tuple[date, date]]:
    """Gap-bridged lifetime segments of a timeline, as closed date intervals."""
    runs = merge_day_runs(_timeline_ordinals(timeline), sensitivity)
    return [(date.fromordinal(a), date.fromordinal(b)) for a, b in runs]


def max_lifetime(timeline: MoasTimeline, sensitivity: int) -> int:
    """Longest segment span in days; monotone non-decreasing in sensitivity."""
    runs = merge_day_runs(_timeline_ordinals(timeline), sensitivity)
    return max(b - a + 1 for a, b in runs)


def observability(timeline: MoasTimeline) -> float:
    """Observed days over the first-to-last-observation span, in (0, 1]."""
    ordinals = _timeline_ordinals(timeline)
    span = max(ordinals) - min(ordinals) + 1
    return len(ordinals) / span


def classify_longevity(
    max_lifetime_days: int, threshold_days: int = DEFAULT_THRESHOLD_DAYS
) -> str:
    """Long-lived means the maximum lifetime reached the threshold (inclusive)."""
    return LONG_LIVED if max_lifetime_days >= threshold_days else SHORT_LIVED


def evaluate(
    timeline: MoasTimeline,
    sensitivity: int,
    threshold_days: int = DEFAULT_THRESHOLD_DAYS,
) -> LifetimeResult:
    """Full per-timeline lifetime computation at one sensitivity."""
    segs = segments(timeline, sensitivity)
    life = max(int((b - a).days) + 1 for a, b in segs)
    days = timeline.observed_days()
    return LifetimeResult(
        prefix=timeline.prefix,
        first_day=days[0],
        last_day=days[-1],
        segments=tuple(segs),
        max_lifetime_days=life,
        observability=len(days) / ((days[-1] - days[0]).days + 1),
        longevity=classify_longevity(life, threshold_days),
    )


def lifetime_cdf(
    lifetimes: Iterable[int], cap_days: int = DEFAULT_CAP_DAYS
) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF of maximum lifetimes capped at ``cap_days``.

    Returns (x, y) with x = 1..cap_days and y[i] the fraction of prefixes
    whose capped lifetime is <= x[i]; y reaches 1.0 at the cap.
    """
    values = np.minimum(np.asarray(list(lifetimes), dtype=np.int64), cap_days)
    if values.size == 0:
        raise ValueError("no lifetimes")
    if values.min() < 1:
        raise ValueError("lifetimes must be >= 1 day")
    x = np.arange(1, cap_days + 1)
    counts = np.bincount(values, minlength=cap_days + 1)[1:]
    y = np.cumsum(counts) / values.size
    return x, y


def kneedle_knee(
    x: Sequence[float],
    y: Sequence[float],
    config: KneeConfig = KneeConfig(),
) -> float:
    """Knee of a concave increasing curve via the Kneedle difference curve.

    Both axes are min-max normalized; the difference d = y_norm - x_norm
    is scanned for local maxima.  A candidate maximum is confirmed once d
    drops below (d_candidate - sensitivity * mean consecutive x_norm step)
    before any higher local maximum appears; the first confirmed
    candidate wins.  If no candidate confirms, the global argmax of d is
    used.  Curves that never rise above their chord (max d below 1e-9)
    have no knee.
    """
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.ndim != 1 or xa.shape != ya.shape:
        raise ValueError("x and y must be 1-d arrays of equal length")
    if xa.size < 3:
        raise ValueError("need at least 3 points")
    if np.any(np.diff(xa) <= 0):
        raise ValueError("x must be strictly increasing")
    if np.any(np.diff(ya) < 0):
        raise ValueError("y must be non-decreasing")
    if ya[-1] == ya[0]:
        raise NoKneeError("flat curve has no knee")

    xn = (xa - xa[0]) / (xa[-1] - xa[0])
    yn = (ya - ya[0]) / (ya[-1] - ya[0])
    d = yn - xn
    if float(d.max()) < _FLAT_EPS:
        raise NoKneeError("curve never rises above its chord")

    n = d.size
    maxima = [i for i in range(1, n - 1) if d[i] > d[i - 1] and d[i] >= d[i + 1]]
    maxima_set = set(maxima)
    mean_dx = float(np.mean(np.diff(xn)))
    for i in maxima:
        threshold = d[i] - config.kneedle_sensitivity * mean_dx
        for j in range(i + 1, n):
            if j in maxima_set and d[j] > d[i]:
                break  # superseded by a higher knee candidate
            if d[j] < threshold:
                return float(xa[i])
    return float(xa[int(np.argmax(d))])


def knee_from_lifetimes(
    lifetimes: Iterable[int], config: KneeConfig = KneeConfig()
) -> tuple[float, float]:
    """Knee of the capped lifetime CDF plus the short-lived fraction below it.

    A population with fewer than two distinct capped lifetimes has no
    elbow to find (its CDF is a single step) and raises NoKneeError.
    """
    values = [min(int(v), config.cap_days) for v in lifetimes]
    if len(set(values)) < 2:
        raise NoKneeError("all lifetimes are equal; no knee")
    x, y = lifetime_cdf(values, config.cap_days)
    knee = kneedle_knee(x, y, config)
    short = sum(1 for v in values if v < knee) / len(values)
    return knee, short


def window_days(window: tuple[date, date]) -> int:
    return (window[1] - window[0]).days + 1


def day_index(day: date, start: date) -> int:
    """1-based day number of ``day`` within a window starting at ``start``."""
    return (day - start).days + 1


def index_day(index: int, start: date) -> date:
    return start + timedelta(days=index - 1)
