"""Paired-URL extraction and per-group event sequence construction."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..core import EventSequence
from .eventlog import LABELS, EventRecord
from .taxonomy import DIMENSIONS, CategorizationError, PlatformTaxonomy, categorize_url


@dataclass(frozen=True)
class PairedUrl:
    """A retweet carrying ``target_url`` of an earlier post carrying ``source_url``."""

    source_url: str
    target_url: str
    source_platform: int
    target_platform: int
    time: float
    group: str
    cascade_id: str
    source_time: float
    record_id: str

    def __post_init__(self):
        for dim in (self.source_platform, self.target_platform):
            if not 0 <= dim < len(DIMENSIONS):
                raise ValueError(f"platform index {dim} out of range")


def dedupe_retweets(records: Iterable[EventRecord]) -> list[EventRecord]:
    """Keep only the earliest retweet of each original by each user.

    Originals always survive. Input order is preserved. Among equal timestamps
    the first occurrence wins.
    """
    records = list(records)
    earliest: dict[tuple[str, str], int] = {}
    for i, r in enumerate(records):
        if r.retweet_of is None:
            continue
        key = (r.user_id, r.retweet_of)
        j = earliest.get(key)
        if j is None or r.timestamp < records[j].timestamp:
            earliest[key] = i
    keep = set(earliest.values())
    return [r for i, r in enumerate(records) if r.retweet_of is None or i in keep]


def derive_pairs(
    records: Iterable[EventRecord], taxonomy: PlatformTaxonomy
) -> tuple[list[PairedUrl], list[str]]:
    """Return ``(pairs, warnings)``; one pair per surviving retweet, in input order."""
    records = dedupe_retweets(records)
    by_id = {r.record_id: r for r in records}
    pairs: list[PairedUrl] = []
    warnings: list[str] = []
    for r in records:
        if r.retweet_of is None:
            continue
        origin = by_id.get(r.retweet_of)
        if origin is None:
            warnings.append(f"record {r.record_id}: retweet_of {r.retweet_of!r} not found; pair skipped")
            continue
        try:
            src = categorize_url(origin.effective_url, taxonomy)
            dst = categorize_url(r.effective_url, taxonomy)
        except CategorizationError as exc:
            warnings.append(f"record {r.record_id}: {exc}; pair skipped")
            continue
        pairs.append(
            PairedUrl(
                source_url=origin.effective_url,
                target_url=r.effective_url,
                source_platform=src,
                target_platform=dst,
                time=r.timestamp,
                group=r.label,
                cascade_id=r.cascade_id,
                source_time=origin.timestamp,
                record_id=r.record_id,
            )
        )
    return pairs, warnings


def _strictly_increasing(times: np.ndarray) -> np.ndarray:
    """Nudge ties upward by one ulp at a time, preserving order of appearance."""
    out = times.copy()
    for i in range(1, out.size):
        if out[i] <= out[i - 1]:
            out[i] = np.nextafter(out[i - 1], np.inf)
    return out


def cascade_bounds(records: Iterable[EventRecord]) -> dict[str, tuple[float, float]]:
    """First and last timestamp of every cascade."""
    bounds: dict[str, tuple[float, float]] = {}
    for r in records:
        lo, hi = bounds.get(r.cascade_id, (r.timestamp, r.timestamp))
        bounds[r.cascade_id] = (min(lo, r.timestamp), max(hi, r.timestamp))
    return bounds


def build_sequences(
    pairs: Sequence[PairedUrl],
    group: str,
    U: int = len(DIMENSIONS),
    bounds: dict[str, tuple[float, float]] | None = None,
    min_horizon: float = 1.0,
) -> list[EventSequence]:
    """One sequence per cascade with at least one ``group`` pair, in first-seen order.

    Every event is marked with its source platform. Times are measured from
    the cascade start and the horizon is the cascade duration, floored at
    ``min_horizon`` seconds. Cascade extents come from ``bounds`` (see
    :func:`cascade_bounds`) when given, otherwise from the pairs themselves.
    """
    if group not in LABELS:
        raise ValueError(f"unknown group {group!r}")
    by_cascade: dict[str, list[PairedUrl]] = defaultdict(list)
    for p in pairs:
        by_cascade[p.cascade_id].append(p)
    sequences = []
    for members in by_cascade.values():
        chosen = [p for p in members if p.group == group]
        if not chosen:
            continue
        if bounds is not None and members[0].cascade_id in bounds:
            start, end = bounds[members[0].cascade_id]
        else:
            start = min(min(p.source_time for p in members), min(p.time for p in members))
            end = max(p.time for p in members)
        # stable sort keeps input order among equal timestamps
        chosen.sort(key=lambda p: p.time)
        times = _strictly_increasing(np.array([p.time - start for p in chosen], dtype=float))
        dims = np.array([p.source_platform for p in chosen], dtype=np.int64)
        T = max(float(end - start), min_horizon, float(times[-1]))
        sequences.append(EventSequence(times, dims, T, U))
    return sequences


def pair_count_matrix(pairs: Iterable[PairedUrl], group: str | None = None) -> np.ndarray:
    """``M[s, d]`` = number of pairs from source platform ``s`` to target ``d``."""
    M = np.zeros((len(DIMENSIONS), len(DIMENSIONS)), dtype=np.int64)
    for p in pairs:
        if group is None or p.group == group:
            M[p.source_platform, p.target_platform] += 1
    return M
