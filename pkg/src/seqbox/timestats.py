"""Event-box statistics: duration quartiles, Tukey-fence outliers, and the
placement of individual occurrences on multi-scale time axes.

An event box aggregates every occurrence of one event type at one grid
position. Its five duration values are the minimum, the 25th/50th/75th
percentiles, and the maximum; points strictly outside the fence
[Q1 - k*IQR, Q3 + k*IQR] are duration outliers. Each point additionally
carries its position on the active vertical time scale and a categorical
color key, so trends of duration against time of occurrence stay visible
inside the aggregate.
"""

from __future__ import annotations

import calendar
import math
from dataclasses import dataclass
from datetime import date, datetime, timezone
from enum import Enum
from typing import Iterable, Optional, Sequence

from .ingest import EventRecord, duration_of
from .sequences import EventSequence, UniqueSequence


class EmptyInput(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class InvalidScale(ValueError):
    pass


class ScaleKind(str, Enum):
    HOUR_OF_DAY = "hour-of-day"
    DAY_OF_WEEK = "day-of-week"
    DAY_OF_MONTH = "day-of-month"
    MONTH_OF_YEAR = "month-of-year"
    ABSOLUTE = "absolute"


# Cyclic span per kind: seconds for the day/week/month-day scales, months for
# the month scale. day-of-month uses the 31-day maximum so every month fits.
_CYCLE_SPAN = {
    ScaleKind.HOUR_OF_DAY: 86_400.0,
    ScaleKind.DAY_OF_WEEK: 604_800.0,
    ScaleKind.DAY_OF_MONTH: 31 * 86_400.0,
    ScaleKind.MONTH_OF_YEAR: 12.0,
}

WEEKDAY_LABELS = ("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun")
MONTH_LABELS = (
    "Jan", "Feb", "Mar", "Apr", "May", "Jun",
    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
)


@dataclass(frozen=True)
class TimeScaleSpec:
    """Mapping of timestamps onto the vertical axis or a color key.

    For cyclic kinds t0/tN are positions within the cycle (defaults span the
    whole cycle); for the absolute kind they are UTC timestamps covering the
    data being visualized.
    """

    kind: ScaleKind
    t0: float | datetime
    tN: float | datetime

    def __post_init__(self) -> None:
        if not self.t0 < self.tN:  # type: ignore[operator]
            raise ValueError(f"scale requires t0 < tN, got [{self.t0}, {self.tN}]")

    @classmethod
    def hour_of_day(cls, t0: float = 0.0, tN: float | None = None) -> "TimeScaleSpec":
        return cls(ScaleKind.HOUR_OF_DAY, t0, _CYCLE_SPAN[ScaleKind.HOUR_OF_DAY] if tN is None else tN)

    @classmethod
    def day_of_week(cls, t0: float = 0.0, tN: float | None = None) -> "TimeScaleSpec":
        return cls(ScaleKind.DAY_OF_WEEK, t0, _CYCLE_SPAN[ScaleKind.DAY_OF_WEEK] if tN is None else tN)

    @classmethod
    def day_of_month(cls, t0: float = 0.0, tN: float | None = None) -> "TimeScaleSpec":
        return cls(ScaleKind.DAY_OF_MONTH, t0, _CYCLE_SPAN[ScaleKind.DAY_OF_MONTH] if tN is None else tN)

    @classmethod
    def month_of_year(cls, t0: float = 0.0, tN: float | None = None) -> "TimeScaleSpec":
        return cls(ScaleKind.MONTH_OF_YEAR, t0, _CYCLE_SPAN[ScaleKind.MONTH_OF_YEAR] if tN is None else tN)

    @classmethod
    def absolute(cls, t0: datetime, tN: datetime) -> "TimeScaleSpec":
        return cls(ScaleKind.ABSOLUTE, t0, tN)

    @property
    def is_cyclic(self) -> bool:
        return self.kind is not ScaleKind.ABSOLUTE


def full_cycle_spec(kind: ScaleKind) -> TimeScaleSpec:
    """A scale spanning one complete cycle of a cyclic kind."""
    if kind is ScaleKind.ABSOLUTE:
        raise InvalidScale("absolute kind has no cycle")
    return TimeScaleSpec(kind, 0.0, _CYCLE_SPAN[kind])


def cycle_position(t: datetime, kind: ScaleKind) -> float:
    """Position of a UTC timestamp within one cycle of the given kind."""
    t = t.astimezone(timezone.utc)
    second_of_day = (
        t.hour * 3600 + t.minute * 60 + t.second + t.microsecond / 1e6
    )
    if kind is ScaleKind.HOUR_OF_DAY:
        return second_of_day
    if kind is ScaleKind.DAY_OF_WEEK:
        return t.weekday() * 86_400 + second_of_day
    if kind is ScaleKind.DAY_OF_MONTH:
        return (t.day - 1) * 86_400 + second_of_day
    if kind is ScaleKind.MONTH_OF_YEAR:
        days_in_month = calendar.monthrange(t.year, t.month)[1]
        return (t.month - 1) + ((t.day - 1) * 86_400 + second_of_day) / (
            days_in_month * 86_400
        )
    raise InvalidScale(f"{kind} has no cyclic position")


def project_occurrence(t: datetime, scale: TimeScaleSpec) -> float:
    """Fraction in [0, 1] placing a timestamp on the vertical time scale.

    Cyclic kinds map the timestamp's cycle position linearly over the
    scale's span and clamp; the absolute kind maps (t - t0)/(tN - t0) and
    raises OutOfRange outside [t0, tN].
    """
    if scale.kind is ScaleKind.ABSOLUTE:
        t0, tN = scale.t0, scale.tN
        assert isinstance(t0, datetime) and isinstance(tN, datetime)
        if t < t0 or t > tN:
            raise OutOfRange(f"{t.isoformat()} outside [{t0.isoformat()}, {tN.isoformat()}]")
        return (t - t0).total_seconds() / (tN - t0).total_seconds()
    pos = cycle_position(t, scale.kind)
    fraction = (pos - float(scale.t0)) / (float(scale.tN) - float(scale.t0))
    return min(1.0, max(0.0, fraction))


def color_key_of(t: datetime, color_scale: TimeScaleSpec) -> int:
    """Categorical index of the timestamp's component on a cyclic scale."""
    if color_scale.kind is ScaleKind.ABSOLUTE:
        raise InvalidScale("absolute scale cannot be a color scale")
    t = t.astimezone(timezone.utc)
    if color_scale.kind is ScaleKind.HOUR_OF_DAY:
        return t.hour
    if color_scale.kind is ScaleKind.DAY_OF_WEEK:
        return t.weekday()
    if color_scale.kind is ScaleKind.DAY_OF_MONTH:
        return t.day - 1
    return t.month - 1


def color_labels(color_scale: Optional[TimeScaleSpec]) -> tuple[str, ...]:
    """Legend labels for a color scale's categorical indices."""
    if color_scale is None:
        return ()
    if color_scale.kind is ScaleKind.HOUR_OF_DAY:
        return tuple(f"{h:02d}h" for h in range(24))
    if color_scale.kind is ScaleKind.DAY_OF_WEEK:
        return WEEKDAY_LABELS
    if color_scale.kind is ScaleKind.DAY_OF_MONTH:
        return tuple(str(d) for d in range(1, 32))
    if color_scale.kind is ScaleKind.MONTH_OF_YEAR:
        return MONTH_LABELS
    raise InvalidScale("absolute scale has no categorical legend")


@dataclass(frozen=True)
class StatsConfig:
    k: float = 1.5
    quartile_method: str = "linear"

    def __post_init__(self) -> None:
        if self.k <= 0:
            raise ValueError(f"k must be > 0, got {self.k}")
        if self.quartile_method != "linear":
            raise ValueError("only linear interpolation of order statistics is supported")


def quartiles(durations: Sequence[float]) -> tuple[float, float, float, float, float]:
    """[Q0..Q4]: min, 25th/50th/75th percentile, max.

    Inner quartiles interpolate linearly between sorted order statistics at
    rank h = (n - 1) * p.
    """
    if not durations:
        raise EmptyInput("quartiles of an empty multiset")
    ordered = sorted(float(d) for d in durations)
    n = len(ordered)

    def interpolate(p: float) -> float:
        h = (n - 1) * p
        f = math.floor(h)
        c = min(f + 1, n - 1)
        return ordered[f] + (h - f) * (ordered[c] - ordered[f])

    return (ordered[0], interpolate(0.25), interpolate(0.5), interpolate(0.75), ordered[-1])


def tukey_fence(
    q: Sequence[float], k: float = 1.5
) -> tuple[float, float]:
    iqr = q[3] - q[1]
    return (q[1] - k * iqr, q[3] + k * iqr)


def classify_outliers(
    durations: Sequence[float],
    q: Sequence[float],
    k: float = 1.5,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partition point indices into (quartile points, outliers).

    A point is an outlier iff its duration lies strictly outside the fence;
    a point exactly on a fence bound stays a quartile point.
    """
    lower, upper = tukey_fence(q, k)
    quartile_points: list[int] = []
    outliers: list[int] = []
    for index, duration in enumerate(durations):
        if duration < lower or duration > upper:
            outliers.append(index)
        else:
            quartile_points.append(index)
    return tuple(quartile_points), tuple(outliers)


@dataclass(frozen=True)
class DataPoint:
    """One individual event occurrence inside an event box."""

    duration: float
    occurrence: datetime
    axis_pos: float
    color_key: Optional[int]
    is_outlier: bool
    member_ref: str


@dataclass(frozen=True)
class EventBox:
    event_type: str
    count: int
    q: tuple[float, float, float, float, float]
    points: tuple[DataPoint, ...]
    fence: tuple[float, float]


def build_event_box(
    event_type: str,
    occurrences: Sequence[tuple[str, EventRecord]],
    axis: TimeScaleSpec,
    color: Optional[TimeScaleSpec] = None,
    cfg: StatsConfig = StatsConfig(),
) -> EventBox:
    """Aggregate (member identifier, record) occurrences of one event type.

    Vertical placement uses each event's start timestamp.
    """
    if not occurrences:
        raise EmptyInput("event box needs at least one occurrence")
    durations = [duration_of(record) for _ref, record in occurrences]
    q = quartiles(durations)
    _inside, outliers = classify_outliers(durations, q, cfg.k)
    outlier_set = set(outliers)
    points = tuple(
        DataPoint(
            duration=durations[i],
            occurrence=record.start,
            axis_pos=project_occurrence(record.start, axis),
            color_key=color_key_of(record.start, color) if color is not None else None,
            is_outlier=i in outlier_set,
            member_ref=ref,
        )
        for i, (ref, record) in enumerate(occurrences)
    )
    return EventBox(
        event_type=event_type,
        count=len(points),
        q=q,
        points=points,
        fence=tukey_fence(q, cfg.k),
    )


class ColorMode(str, Enum):
    TIME_SCALE = "time-scale"
    UNIFORM_ALPHA = "uniform-alpha"


class LodPreset(str, Enum):
    POINT = "point"
    INTERVAL_NO_OUTLIERS = "interval-no-outliers"
    INTERVAL_WITH_OUTLIERS = "interval-with-outliers"
    DETAILED_QUARTILES = "detailed-quartiles"
    PLAIN_QUARTILES = "plain-quartiles"
    UNCOLORED = "uncolored"


# Fixed bijection preset -> (collapsed, show_outlier_points,
# show_quartile_points, color_mode); six distinct configurations.
_PRESET_FLAGS = {
    LodPreset.POINT: (True, False, False, ColorMode.TIME_SCALE),
    LodPreset.INTERVAL_NO_OUTLIERS: (False, False, True, ColorMode.TIME_SCALE),
    LodPreset.INTERVAL_WITH_OUTLIERS: (False, True, False, ColorMode.TIME_SCALE),
    LodPreset.DETAILED_QUARTILES: (False, True, True, ColorMode.TIME_SCALE),
    LodPreset.PLAIN_QUARTILES: (False, False, False, ColorMode.TIME_SCALE),
    LodPreset.UNCOLORED: (False, True, True, ColorMode.UNIFORM_ALPHA),
}


@dataclass(frozen=True)
class DetailLevel:
    preset: LodPreset

    @property
    def collapsed(self) -> bool:
        return _PRESET_FLAGS[self.preset][0]

    @property
    def show_outlier_points(self) -> bool:
        return _PRESET_FLAGS[self.preset][1]

    @property
    def show_quartile_points(self) -> bool:
        return _PRESET_FLAGS[self.preset][2]

    @property
    def color_mode(self) -> ColorMode:
        return _PRESET_FLAGS[self.preset][3]


@dataclass(frozen=True)
class FilterSpec:
    """Date-range and day-of-week filtering at sequence granularity.

    A sequence passes when its first event's date satisfies every configured
    constraint. Weekdays are Monday=0 .. Sunday=6.
    """

    date_from: Optional[date] = None
    date_to: Optional[date] = None
    days_of_week: Optional[frozenset[int]] = None

    def __post_init__(self) -> None:
        if (
            self.date_from is not None
            and self.date_to is not None
            and self.date_from > self.date_to
        ):
            raise ValueError("date_from must be <= date_to")
        if self.days_of_week is not None:
            if not self.days_of_week:
                raise ValueError("days_of_week must be nonempty when present")
            if not self.days_of_week <= set(range(7)):
                raise ValueError("days_of_week entries must be in 0..6")

    def accepts(self, start_date: date) -> bool:
        if self.date_from is not None and start_date < self.date_from:
            return False
        if self.date_to is not None and start_date > self.date_to:
            return False
        if self.days_of_week is not None and start_date.weekday() not in self.days_of_week:
            return False
        return True


def apply_filter(
    sequences: Iterable[EventSequence], spec: FilterSpec
) -> list[EventSequence]:
    """Keep the sequences whose start date passes the filter, order preserved."""
    return [seq for seq in sequences if spec.accepts(seq.start_date)]


def breakdown_row(
    row: UniqueSequence, criterion: str = "day-of-week"
) -> list[tuple[int, UniqueSequence]]:
    """Subdivide a unique sequence by its members' start weekday.

    Returns (weekday, sub-row) pairs ordered Monday through Sunday; empty
    weekday groups are omitted. Sub-row frequencies sum to the row's.
    """
    if criterion != "day-of-week":
        raise ValueError(f"unsupported breakdown criterion: {criterion}")
    if not row.members:
        raise EmptyInput("cannot break down an empty row")
    by_weekday: dict[int, list[EventSequence]] = {}
    for member in row.members:
        by_weekday.setdefault(member.start_date.weekday(), []).append(member)
    return [
        (weekday, UniqueSequence(row.signature, tuple(by_weekday[weekday])))
        for weekday in sorted(by_weekday)
    ]
