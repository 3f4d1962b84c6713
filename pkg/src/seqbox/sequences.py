"""Per-identifier event sequences, unique-sequence extraction, coverage selection.

A unique sequence is the equivalence class of event sequences sharing the same
ordered event-type list exactly; its frequency is the class size. The coverage
selection keeps the frequency-descending prefix of unique sequences that jointly
explains at least the configured fraction of all sequences.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, timezone
from typing import Iterable, Sequence

from .ingest import EventLog, EventRecord


@dataclass(frozen=True)
class EventSequence:
    identifier: str
    events: tuple[EventRecord, ...]

    @property
    def start_date(self) -> date:
        """UTC date of the first event's start."""
        return self.events[0].start.astimezone(timezone.utc).date()

    @property
    def signature(self) -> tuple[str, ...]:
        return tuple(e.event_type for e in self.events)


@dataclass(frozen=True)
class UniqueSequence:
    signature: tuple[str, ...]
    members: tuple[EventSequence, ...]

    @property
    def frequency(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class CoverageSelection:
    selected: tuple[UniqueSequence, ...]
    coverage_ratio: float
    threshold: float
    total: int


def build_sequences(log: EventLog) -> list[EventSequence]:
    """Group the log's records into one sequence per identifier.

    Events are sorted by start; ties keep file order. Sequences appear in
    order of each identifier's first occurrence in the log.
    """
    groups: dict[str, list[EventRecord]] = {}
    for record in log.records:
        groups.setdefault(record.identifier, []).append(record)
    return [
        EventSequence(identifier, tuple(sorted(records, key=lambda r: r.start)))
        for identifier, records in groups.items()
    ]


def extract_unique_sequences(
    sequences: Iterable[EventSequence],
) -> list[UniqueSequence]:
    """Partition sequences by exact event-type signature.

    Output is sorted by frequency descending, ties by lexicographic
    signature, so identical inputs always produce identical orderings.
    """
    groups: dict[tuple[str, ...], list[EventSequence]] = {}
    for seq in sequences:
        groups.setdefault(seq.signature, []).append(seq)
    uniques = [
        UniqueSequence(signature, tuple(members))
        for signature, members in groups.items()
    ]
    uniques.sort(key=lambda u: (-u.frequency, u.signature))
    return uniques


def select_by_coverage(
    uniques: Sequence[UniqueSequence],
    threshold: float = 0.8,
    min_frequency: int = 1,
) -> CoverageSelection:
    """Select the frequency-descending prefix covering `threshold` of all
    sequences, then drop selected entries below `min_frequency`.

    The reported coverage_ratio reflects the final selection, so it can fall
    below the threshold when the floor removes prefix entries.
    """
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    if min_frequency < 1:
        raise ValueError(f"min_frequency must be >= 1, got {min_frequency}")
    total = sum(u.frequency for u in uniques)
    prefix: list[UniqueSequence] = []
    cumulative = 0
    for unique in uniques:
        if cumulative / total >= threshold and prefix:
            break
        prefix.append(unique)
        cumulative += unique.frequency
    selected = tuple(u for u in prefix if u.frequency >= min_frequency)
    covered = sum(u.frequency for u in selected)
    return CoverageSelection(
        selected=selected,
        coverage_ratio=covered / total,
        threshold=threshold,
        total=total,
    )
