"""Cascade size, duration, suspended-user and daily paired-URL statistics."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable

from .eventlog import EventRecord
from .pairs import dedupe_retweets


@dataclass(frozen=True)
class CascadeSummary:
    cascade_id: str
    size: int
    duration: float
    suspended_users: int
    normal_users: int


@dataclass(frozen=True)
class CascadeStats:
    cascades: tuple[CascadeSummary, ...]
    # (UTC date, group) -> number of paired URLs
    daily_pairs: dict[tuple[str, str], int]

    def size_histogram(self) -> list[tuple[int, int]]:
        counts = Counter(c.size for c in self.cascades)
        return sorted(counts.items())

    def duration_cdf(self) -> list[tuple[float, float]]:
        n = len(self.cascades)
        if n == 0:
            return []
        counts = Counter(c.duration for c in self.cascades)
        rows, running = [], 0
        for d in sorted(counts):
            running += counts[d]
            rows.append((d, running / n))
        return rows

    def daily_table(self) -> list[tuple[str, int, int]]:
        days = sorted({day for day, _ in self.daily_pairs})
        return [(day, self.daily_pairs.get((day, "psm"), 0), self.daily_pairs.get((day, "normal"), 0)) for day in days]


def utc_day(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%d")


def cascade_stats(records: Iterable[EventRecord]) -> CascadeStats:
    """Statistics over deduplicated records; cascades listed in first-seen order.

    A paired URL is a surviving retweet whose ``retweet_of`` target exists,
    counted on the retweet's UTC day under the retweeter's label.
    """
    records = dedupe_retweets(records)
    ids = {r.record_id for r in records}
    members: dict[str, list[EventRecord]] = defaultdict(list)
    for r in records:
        members[r.cascade_id].append(r)
    summaries = []
    for cid, rows in members.items():
        times = [r.timestamp for r in rows]
        psm_users = {r.user_id for r in rows if r.label == "psm"}
        normal_users = {r.user_id for r in rows if r.label == "normal"}
        summaries.append(
            CascadeSummary(
                cascade_id=cid,
                size=len(rows),
                duration=max(times) - min(times),
                suspended_users=len(psm_users),
                normal_users=len(normal_users),
            )
        )
    daily: Counter = Counter()
    for r in records:
        if r.retweet_of is not None and r.retweet_of in ids:
            daily[(utc_day(r.timestamp), r.label)] += 1
    return CascadeStats(tuple(summaries), dict(daily))
