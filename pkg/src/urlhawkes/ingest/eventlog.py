"""Retweet event-log CSV reading and writing."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Iterable

HEADER = ("record_id", "cascade_id", "user_id", "timestamp", "url", "label", "retweet_of")
LABELS = ("psm", "normal")


class EventLogError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class EventRecord:
    record_id: str
    cascade_id: str
    user_id: str
    timestamp: float
    url: str
    label: str
    retweet_of: str | None = None
    # Filled in by URL resolution; None means the raw URL is used as-is.
    resolved_url: str | None = None
    unresolved: bool = False

    @property
    def is_original(self) -> bool:
        return self.retweet_of is None

    @property
    def effective_url(self) -> str:
        return self.resolved_url if self.resolved_url is not None else self.url


def _parse_timestamp(text: str, line: int) -> float:
    try:
        value = int(text)
    except ValueError:
        try:
            value = float(text)
        except ValueError:
            raise EventLogError(f"unparseable timestamp {text!r}", line) from None
    if not (math.isfinite(value) and value >= 0):
        raise EventLogError(f"timestamp must be a non-negative number, got {text!r}", line)
    return value


def parse_event_log(path: str | os.PathLike) -> list[EventRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EventLogError("missing header", 1) from None
        if tuple(h.strip() for h in header) != HEADER:
            raise EventLogError(f"expected header {','.join(HEADER)!r}, got {','.join(header)!r}", 1)
        records = []
        seen = set()
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(HEADER):
                raise EventLogError(f"expected {len(HEADER)} fields, got {len(row)}", line)
            record_id, cascade_id, user_id, ts, url, label, retweet_of = (f.strip() for f in row)
            if label not in LABELS:
                raise EventLogError(f"unknown label {label!r}", line)
            if not record_id:
                raise EventLogError("empty record_id", line)
            if record_id in seen:
                raise EventLogError(f"duplicate record_id {record_id!r}", line)
            seen.add(record_id)
            records.append(
                EventRecord(
                    record_id=record_id,
                    cascade_id=cascade_id,
                    user_id=user_id,
                    timestamp=_parse_timestamp(ts, line),
                    url=url,
                    label=label,
                    retweet_of=retweet_of or None,
                )
            )
    return records


def format_timestamp(ts: float) -> str:
    """Integers print bare; fractional times use the shortest round-trip repr."""
    if float(ts).is_integer():
        return str(int(ts))
    return repr(float(ts))


def write_event_log(records: Iterable[EventRecord], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(HEADER)
        for r in records:
            writer.writerow(
                [r.record_id, r.cascade_id, r.user_id, format_timestamp(r.timestamp), r.url, r.label, r.retweet_of or ""]
            )
