"""Synthetic event-log generator with planted, verifiable patterns.

Each template stamps out sequences sharing one signature, so unique-sequence
counts are known by construction. Outlier plants multiply selected durations
far enough past the Tukey fence that they must be flagged downstream; trend
plants tie a duration to the event's hour of day so a rank correlation of the
configured sign is guaranteed. Generation is a pure function of the seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from pathlib import Path
from typing import Optional, Union

from .ingest import EventLog, EventRecord, write_csv

# Fence multiplier the guarantees are computed against; matches the analysis
# default.
FENCE_K = 1.5


class SpecError(ValueError):
    """A synthetic-spec file failed validation."""


@dataclass(frozen=True)
class DurationSpec:
    point: bool = False
    min_seconds: float = 0.0
    max_seconds: float = 0.0


@dataclass(frozen=True)
class ArrivalSpec:
    hour_min: float = 8.0
    hour_max: float = 17.0
    days_of_week: Optional[tuple[int, ...]] = None


@dataclass(frozen=True)
class Template:
    name: str
    signature: tuple[str, ...]
    frequency: int
    durations: tuple[DurationSpec, ...]
    arrival: ArrivalSpec = ArrivalSpec()


@dataclass(frozen=True)
class OutlierPlant:
    template: str
    event_position: int
    count: int
    duration_multiplier: float


@dataclass(frozen=True)
class TrendPlant:
    template: str
    event_position: int
    start_duration: float
    slope_per_hour: float
    noise_seconds: float = 0.0


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int
    start_date: date
    days: int
    templates: tuple[Template, ...]
    planted_outliers: tuple[OutlierPlant, ...] = ()
    planted_trend: Optional[TrendPlant] = None
    gap_min_seconds: float = 0.0
    gap_max_seconds: float = 120.0


def outlier_fence_bound(duration: DurationSpec, k: float = FENCE_K) -> float:
    """Smallest multiplier guaranteed to push a planted duration past the
    upper fence, assuming the box's quartiles stay within [min, max].

    Worst case: Q3 = max and IQR = max - min, so the fence tops out at
    max + k * (max - min); dividing by the smallest possible base duration
    gives the bound.
    """
    spread = duration.max_seconds - duration.min_seconds
    return (duration.max_seconds + k * spread) / duration.min_seconds


def _duration_from_dict(data: dict, where: str) -> DurationSpec:
    if data.get("point"):
        return DurationSpec(point=True)
    try:
        lo = float(data["min_seconds"])
        hi = float(data["max_seconds"])
    except (KeyError, TypeError, ValueError):
        raise SpecError(f"{where}: need point=true or min_seconds/max_seconds") from None
    if lo < 0 or hi < lo:
        raise SpecError(f"{where}: require 0 <= min_seconds <= max_seconds")
    return DurationSpec(min_seconds=lo, max_seconds=hi)


def _arrival_from_dict(data: dict, where: str) -> ArrivalSpec:
    hour_min = float(data.get("hour_min", 8.0))
    hour_max = float(data.get("hour_max", 17.0))
    if not 0 <= hour_min < hour_max <= 24:
        raise SpecError(f"{where}: require 0 <= hour_min < hour_max <= 24")
    days = data.get("days_of_week")
    if days is not None:
        days = tuple(int(d) for d in days)
        if not days or not set(days) <= set(range(7)):
            raise SpecError(f"{where}: days_of_week must be a nonempty subset of 0..6")
    return ArrivalSpec(hour_min=hour_min, hour_max=hour_max, days_of_week=days)


def spec_from_dict(data: dict) -> SyntheticSpec:
    try:
        seed = int(data["seed"])
        start = date.fromisoformat(data["start_date"])
        days = int(data["days"])
        raw_templates = data["templates"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"spec requires seed, start_date, days, templates: {exc}") from None
    if days < 1:
        raise SpecError("days must be >= 1")
    if not raw_templates:
        raise SpecError("templates must be nonempty")

    templates: list[Template] = []
    for t_index, raw in enumerate(raw_templates):
        where = f"templates[{t_index}]"
        name = str(raw.get("name", f"template-{t_index}"))
        signature = tuple(str(s) for s in raw.get("signature", ()))
        if not signature:
            raise SpecError(f"{where}: signature must be nonempty")
        frequency = int(raw.get("frequency", 0))
        if frequency < 1:
            raise SpecError(f"{where}: frequency must be >= 1")
        raw_durations = raw.get("durations")
        if raw_durations is None or len(raw_durations) != len(signature):
            raise SpecError(f"{where}: durations must match signature length")
        durations = tuple(
            _duration_from_dict(d, f"{where}.durations[{i}]")
            for i, d in enumerate(raw_durations)
        )
        arrival = _arrival_from_dict(raw.get("arrival", {}), f"{where}.arrival")
        if arrival.days_of_week is not None:
            eligible = [
                offset
                for offset in range(days)
                if (start + timedelta(days=offset)).weekday() in arrival.days_of_week
            ]
            if not eligible:
                raise SpecError(f"{where}: no day in the window matches days_of_week")
        templates.append(Template(name, signature, frequency, durations, arrival))
    names = [t.name for t in templates]
    if len(set(names)) != len(names):
        raise SpecError("template names must be distinct")
    by_name = {t.name: t for t in templates}

    def resolve(ref: Union[str, int], where: str) -> Template:
        if isinstance(ref, int):
            if not 0 <= ref < len(templates):
                raise SpecError(f"{where}: template index {ref} out of range")
            return templates[ref]
        if ref not in by_name:
            raise SpecError(f"{where}: unknown template {ref!r}")
        return by_name[ref]

    outlier_plants: list[OutlierPlant] = []
    for o_index, raw in enumerate(data.get("planted_outliers", ())):
        where = f"planted_outliers[{o_index}]"
        template = resolve(raw.get("template"), where)
        position = int(raw.get("event_position", -1))
        if not 0 <= position < len(template.signature):
            raise SpecError(f"{where}: event_position out of range")
        target = template.durations[position]
        if target.point:
            raise SpecError(f"{where}: cannot plant outliers on a point event")
        if target.min_seconds <= 0:
            raise SpecError(f"{where}: target duration needs min_seconds > 0")
        count = int(raw.get("count", 0))
        if count < 1:
            raise SpecError(f"{where}: count must be >= 1")
        if 4 * count >= template.frequency:
            raise SpecError(
                f"{where}: count must stay under a quarter of the template "
                f"frequency so the quartiles keep their base range"
            )
        multiplier = float(raw.get("duration_multiplier", 0))
        bound = outlier_fence_bound(target)
        if multiplier <= bound:
            raise SpecError(
                f"{where}: duration_multiplier must exceed the fence bound "
                f"{bound:.3f} implied by the duration range"
            )
        outlier_plants.append(OutlierPlant(template.name, position, count, multiplier))

    trend: Optional[TrendPlant] = None
    raw_trend = data.get("planted_trend")
    if raw_trend is not None:
        where = "planted_trend"
        template = resolve(raw_trend.get("template"), where)
        position = int(raw_trend.get("event_position", -1))
        if not 0 <= position < len(template.signature):
            raise SpecError(f"{where}: event_position out of range")
        if template.durations[position].point:
            raise SpecError(f"{where}: cannot plant a trend on a point event")
        for plant in outlier_plants:
            if plant.template == template.name and plant.event_position == position:
                raise SpecError(f"{where}: collides with an outlier plant")
        start_duration = float(raw_trend.get("start_duration", 0))
        if start_duration <= 0:
            raise SpecError(f"{where}: start_duration must be > 0")
        trend = TrendPlant(
            template=template.name,
            event_position=position,
            start_duration=start_duration,
            slope_per_hour=float(raw_trend.get("slope_per_hour", 0)),
            noise_seconds=float(raw_trend.get("noise_seconds", 0)),
        )
        if trend.noise_seconds < 0:
            raise SpecError(f"{where}: noise_seconds must be >= 0")

    gap_min = float(data.get("gap_min_seconds", 0.0))
    gap_max = float(data.get("gap_max_seconds", 120.0))
    if gap_min < 0 or gap_max < gap_min:
        raise SpecError("require 0 <= gap_min_seconds <= gap_max_seconds")

    return SyntheticSpec(
        seed=seed,
        start_date=start,
        days=days,
        templates=tuple(templates),
        planted_outliers=tuple(outlier_plants),
        planted_trend=trend,
        gap_min_seconds=gap_min,
        gap_max_seconds=gap_max,
    )


def load_spec(path: Union[str, Path]) -> SyntheticSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SpecError("spec file must contain a JSON object")
    return spec_from_dict(data)


def _ms(seconds: float) -> timedelta:
    return timedelta(milliseconds=round(seconds * 1000))


def generate_records(spec: SyntheticSpec) -> list[EventRecord]:
    rng = random.Random(spec.seed)
    base = datetime(
        spec.start_date.year, spec.start_date.month, spec.start_date.day,
        tzinfo=timezone.utc,
    )
    records: list[EventRecord] = []
    counter = 0
    for template in spec.templates:
        outlier_members: dict[int, dict[int, float]] = {}
        for plant in spec.planted_outliers:
            if plant.template != template.name:
                continue
            chosen = rng.sample(range(template.frequency), plant.count)
            for member in chosen:
                outlier_members.setdefault(member, {})[plant.event_position] = (
                    plant.duration_multiplier
                )
        trend = spec.planted_trend
        if trend is not None and trend.template != template.name:
            trend = None

        arrival = template.arrival
        if arrival.days_of_week is None:
            eligible_days = range(spec.days)
        else:
            eligible_days = [
                offset
                for offset in range(spec.days)
                if (spec.start_date + timedelta(days=offset)).weekday()
                in arrival.days_of_week
            ]
        for member in range(template.frequency):
            identifier = f"s{counter:05d}"
            counter += 1
            day = eligible_days[rng.randrange(len(eligible_days))]
            second = rng.uniform(arrival.hour_min * 3600, arrival.hour_max * 3600)
            t = base + timedelta(days=day) + _ms(second)
            for position, event_type in enumerate(template.signature):
                duration_spec = template.durations[position]
                if duration_spec.point:
                    records.append(EventRecord(identifier, event_type, t, None))
                else:
                    if trend is not None and trend.event_position == position:
                        hour = (
                            t.hour + t.minute / 60 + t.second / 3600
                            + t.microsecond / 3.6e9
                        )
                        duration = (
                            trend.start_duration
                            + trend.slope_per_hour * (hour - arrival.hour_min)
                            + rng.uniform(-trend.noise_seconds, trend.noise_seconds)
                        )
                        duration = max(duration, 1.0)
                    else:
                        duration = rng.uniform(
                            duration_spec.min_seconds, duration_spec.max_seconds
                        )
                    multiplier = outlier_members.get(member, {}).get(position)
                    if multiplier is not None:
                        duration *= multiplier
                    end = t + _ms(duration)
                    records.append(EventRecord(identifier, event_type, t, end))
                    t = end
                t += _ms(rng.uniform(spec.gap_min_seconds, spec.gap_max_seconds))
    return records


def generate_log(spec: SyntheticSpec) -> EventLog:
    return EventLog.from_records(generate_records(spec))


def generate_csv(spec: SyntheticSpec) -> str:
    """CSV text for the spec; identical bytes for identical specs."""
    return write_csv(generate_log(spec))
