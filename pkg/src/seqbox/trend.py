"""Duration-versus-occurrence trend reporting.

Spearman rank correlation between event durations and their projected time
of occurrence. Ranks are robust to the heavy-tailed durations the event-box
encoding is built to expose; ties take average ranks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .ingest import EventLog, duration_of
from .sequences import build_sequences
from .timestats import FilterSpec, TimeScaleSpec, apply_filter, project_occurrence


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the average of their rank span."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation in [-1, 1]; 0 when either side is constant."""
    if len(x) != len(y):
        raise ValueError("series must have equal length")
    n = len(x)
    if n < 2:
        return 0.0
    rx = average_ranks(x)
    ry = average_ranks(y)
    mean = (n + 1) / 2
    sxx = sum((r - mean) ** 2 for r in rx)
    syy = sum((r - mean) ** 2 for r in ry)
    if sxx == 0 or syy == 0:
        return 0.0
    sxy = sum((a - mean) * (b - mean) for a, b in zip(rx, ry))
    return sxy / math.sqrt(sxx * syy)


@dataclass(frozen=True)
class TrendEntry:
    event_type: str
    n: int
    correlation: float


def trend_report(
    log: EventLog,
    scale: TimeScaleSpec,
    event_types: Optional[Sequence[str]] = None,
    filter_spec: FilterSpec = FilterSpec(),
) -> list[TrendEntry]:
    """Correlation of duration against projected occurrence per event type.

    Covers the requested event types (all types in the filtered data when
    omitted), ordered alphabetically for a stable report.
    """
    sequences = apply_filter(build_sequences(log), filter_spec)
    by_type: dict[str, tuple[list[float], list[float]]] = {}
    for sequence in sequences:
        for event in sequence.events:
            durations, positions = by_type.setdefault(event.event_type, ([], []))
            durations.append(duration_of(event))
            positions.append(project_occurrence(event.start, scale))
    if event_types is None:
        selected = sorted(by_type)
    else:
        missing = [t for t in event_types if t not in by_type]
        if missing:
            raise ValueError(f"event types not present: {', '.join(missing)}")
        selected = list(event_types)
    return [
        TrendEntry(
            event_type=event_type,
            n=len(by_type[event_type][0]),
            correlation=spearman(by_type[event_type][1], by_type[event_type][0]),
        )
        for event_type in selected
    ]
