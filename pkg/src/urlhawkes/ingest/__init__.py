"""Event-log ingestion: parsing, unshortening, categorization, pairing, statistics."""

from __future__ import annotations

from dataclasses import dataclass, field

from .eventlog import HEADER, LABELS, EventLogError, EventRecord, parse_event_log, write_event_log
from .pairs import (
    PairedUrl,
    build_sequences,
    cascade_bounds,
    dedupe_retweets,
    derive_pairs,
    pair_count_matrix,
)
from .resolve import HttpFetcher, ResolutionError, UrlCache, default_cache_path, resolve_records, resolve_url
from .stats import CascadeStats, CascadeSummary, cascade_stats
from .taxonomy import DIMENSIONS, CategorizationError, PlatformTaxonomy, categorize_url, load_taxonomy


@dataclass
class IngestResult:
    records: list[EventRecord]
    pairs: list[PairedUrl]
    bounds: dict[str, tuple[float, float]]
    warnings: list[str] = field(default_factory=list)

    def sequences(self, group: str):
        return build_sequences(self.pairs, group, bounds=self.bounds)


def filter_cascades(records: list[EventRecord], min_size: int) -> list[EventRecord]:
    """Drop cascades with fewer than ``min_size`` deduplicated records."""
    if min_size <= 1:
        return list(records)
    sizes: dict[str, int] = {}
    for r in dedupe_retweets(records):
        sizes[r.cascade_id] = sizes.get(r.cascade_id, 0) + 1
    return [r for r in records if sizes.get(r.cascade_id, 0) >= min_size]


def ingest(
    path,
    taxonomy: PlatformTaxonomy | None = None,
    cache: UrlCache | None = None,
    fetch=None,
    offline: bool = True,
    min_cascade_size: int = 1,
) -> IngestResult:
    """Parse, resolve, categorize and pair an event log."""
    taxonomy = taxonomy if taxonomy is not None else load_taxonomy()
    records = parse_event_log(path)
    records = filter_cascades(records, min_cascade_size)
    if cache is not None:
        records = resolve_records(records, cache, fetch=fetch, offline=offline)
    warnings = [f"record {r.record_id}: could not resolve {r.url}" for r in records if r.unresolved]
    pairs, pair_warnings = derive_pairs(records, taxonomy)
    bounds = cascade_bounds(dedupe_retweets(records))
    return IngestResult(records, pairs, bounds, warnings + pair_warnings)


__all__ = [
    "DIMENSIONS", "HEADER", "LABELS", "CascadeStats", "CascadeSummary", "CategorizationError",
    "EventLogError", "EventRecord", "HttpFetcher", "IngestResult", "PairedUrl", "PlatformTaxonomy",
    "ResolutionError", "UrlCache", "build_sequences", "cascade_bounds", "cascade_stats",
    "categorize_url", "dedupe_retweets", "default_cache_path", "derive_pairs", "filter_cascades",
    "ingest", "load_taxonomy", "pair_count_matrix", "parse_event_log", "resolve_records",
    "resolve_url", "write_event_log",
]
