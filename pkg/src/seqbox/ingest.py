"""Event-log ingestion: CSV parsing, validation, and the canonical data model.

An event is a time-stamped occurrence with an identifier (who), an event type
(what), a start (when), and an optional end (for how long). Logs are immutable
after construction and safe to share between threads.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from enum import Enum
from typing import IO, Iterable, Union


class IngestError(ValueError):
    """Base class for event-log ingestion failures."""


class MalformedRow(IngestError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NegativeDuration(IngestError):
    def __init__(self, line: int):
        super().__init__(f"line {line}: end precedes start")
        self.line = line


class EmptyLog(IngestError):
    def __init__(self) -> None:
        super().__init__("log contains no data rows")


class IngestFormat(Enum):
    CSV = "csv"


# The two accepted header layouts. `duration_seconds` is an alternative to an
# explicit end timestamp; end = start + duration.
_HEADER_END = ("id", "event_type", "start", "end")
_HEADER_DURATION = ("id", "event_type", "start", "duration_seconds")


@dataclass(frozen=True)
class EventRecord:
    """One time-stamped occurrence. A missing end marks a point event."""

    identifier: str
    event_type: str
    start: datetime
    end: datetime | None = None


@dataclass(frozen=True)
class EventLog:
    records: tuple[EventRecord, ...]
    type_catalog: frozenset[str]
    time_extent: tuple[datetime, datetime]

    @classmethod
    def from_records(cls, records: Iterable[EventRecord]) -> "EventLog":
        recs = tuple(records)
        if not recs:
            raise EmptyLog()
        catalog = frozenset(r.event_type for r in recs)
        lo = min(r.start for r in recs)
        hi = max(r.end if r.end is not None else r.start for r in recs)
        return cls(records=recs, type_catalog=catalog, time_extent=(lo, hi))


def parse_timestamp(text: str, line: int = 0) -> datetime:
    """Parse an ISO-8601 timestamp with a mandatory zone designator.

    Normalized to UTC and truncated to millisecond precision. Timestamps
    without a timezone are rejected rather than guessed: a silently assumed
    zone would corrupt every hour-of-day statistic downstream.
    """
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(raw)
    except ValueError:
        raise MalformedRow(line, f"unparseable timestamp {text!r}") from None
    if ts.tzinfo is None:
        raise MalformedRow(line, f"timestamp {text!r} lacks a timezone")
    ts = ts.astimezone(timezone.utc)
    return ts.replace(microsecond=ts.microsecond // 1000 * 1000)


def format_timestamp(ts: datetime) -> str:
    """ISO-8601 UTC text, millisecond precision, `Z` designator."""
    ts = ts.astimezone(timezone.utc)
    base = ts.strftime("%Y-%m-%dT%H:%M:%S")
    if ts.microsecond:
        base += f".{ts.microsecond // 1000:03d}"
    return base + "Z"


def parse_event_log(
    source: Union[str, IO[str]],
    format: IngestFormat = IngestFormat.CSV,
) -> EventLog:
    """Parse a CSV character stream into an EventLog.

    The header must name exactly the columns ``id,event_type,start,end`` or
    ``id,event_type,start,duration_seconds``. Rows are kept in file order;
    an empty end (or duration) cell yields a point event.

    Raises MalformedRow, NegativeDuration, or EmptyLog. Line numbers are
    1-based physical lines (the header is line 1).
    """
    if format is not IngestFormat.CSV:
        raise ValueError(f"unsupported format: {format}")
    stream = io.StringIO(source) if isinstance(source, str) else source
    reader = csv.reader(stream)

    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow(1, "missing header row") from None
    columns = tuple(cell.strip() for cell in header)
    if columns == _HEADER_END:
        duration_column = False
    elif columns == _HEADER_DURATION:
        duration_column = True
    else:
        raise MalformedRow(
            1,
            f"header must be {','.join(_HEADER_END)} or "
            f"{','.join(_HEADER_DURATION)}, got {','.join(columns)}",
        )

    records: list[EventRecord] = []
    for row in reader:
        line = reader.line_num
        if not row:
            continue
        if len(row) != 4:
            raise MalformedRow(line, f"expected 4 fields, got {len(row)}")
        identifier, event_type, start_text, last = (cell.strip() for cell in row)
        if not identifier:
            raise MalformedRow(line, "empty id")
        if not event_type:
            raise MalformedRow(line, "empty event_type")
        if not start_text:
            raise MalformedRow(line, "empty start")
        start = parse_timestamp(start_text, line)
        end: datetime | None
        if not last:
            end = None
        elif duration_column:
            try:
                seconds = float(last)
            except ValueError:
                raise MalformedRow(line, f"unparseable duration {last!r}") from None
            if seconds < 0:
                raise NegativeDuration(line)
            end = start + timedelta(milliseconds=round(seconds * 1000))
        else:
            end = parse_timestamp(last, line)
            if end < start:
                raise NegativeDuration(line)
        records.append(EventRecord(identifier, event_type, start, end))

    return EventLog.from_records(records)


def write_csv(log: EventLog) -> str:
    """Serialize an EventLog back to the canonical end-column CSV format.

    Round-trips exactly: re-parsing the output yields an equal EventLog.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_HEADER_END)
    for r in log.records:
        writer.writerow(
            (
                r.identifier,
                r.event_type,
                format_timestamp(r.start),
                format_timestamp(r.end) if r.end is not None else "",
            )
        )
    return out.getvalue()


def duration_of(record: EventRecord) -> float:
    """Duration in seconds; 0 for point events."""
    if record.end is None:
        return 0.0
    return (record.end - record.start).total_seconds()
