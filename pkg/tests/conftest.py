from __future__ import annotations

from datetime import datetime, timedelta, timezone

import pytest

from seqbox.ingest import EventLog, EventRecord

T0 = datetime(2019, 3, 4, 9, 0, 0, tzinfo=timezone.utc)  # a Monday


def ts(offset_seconds: float = 0.0) -> datetime:
    return T0 + timedelta(seconds=offset_seconds)


def rec(
    identifier: str,
    event_type: str,
    start_offset: float = 0.0,
    duration: float | None = None,
) -> EventRecord:
    start = ts(start_offset)
    end = None if duration is None else start + timedelta(seconds=duration)
    return EventRecord(identifier, event_type, start, end)


def log_of(*records: EventRecord) -> EventLog:
    return EventLog.from_records(records)


@pytest.fixture
def simple_csv() -> str:
    return (
        "id,event_type,start,end\n"
        "p1,Check-in Kiosk,2019-03-04T09:00:00Z,2019-03-04T09:05:00Z\n"
        "p1,In Consultation,2019-03-04T09:10:00Z,2019-03-04T09:40:00Z\n"
        "p2,Check-in Kiosk,2019-03-05T10:00:00Z,\n"
    )
