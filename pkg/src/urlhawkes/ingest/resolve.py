"""URL unshortening with a persistent append-only cache.

The cache file holds one ``input_url<TAB>resolved_url`` line per entry and is
read in full when opened. Later lines win over earlier ones.
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Protocol
from urllib.parse import urljoin

from .eventlog import EventRecord
from .taxonomy import CategorizationError, url_host

CACHE_ENV = "URLHAWKES_CACHE"
MAX_REDIRECTS = 10

# Hosts whose links are redirect wrappers rather than content.
SHORTENER_HOSTS = frozenset(
    {
        "t.co", "bit.ly", "bitly.com", "goo.gl", "ow.ly", "tinyurl.com", "buff.ly", "dlvr.it",
        "ift.tt", "is.gd", "j.mp", "fb.me", "wp.me", "tiny.cc", "lnkd.in", "trib.al", "shar.es",
        "su.pr", "mf.tt", "v.gd", "cutt.ly", "rebrand.ly", "bit.do", "amzn.to", "youtu.be",
    }
)


class ResolutionError(RuntimeError):
    pass


class Fetcher(Protocol):
    def __call__(self, url: str) -> tuple[int, str | None]:
        """Return ``(status, location header or None)`` for a single hop."""


def default_cache_path() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "urlhawkes" / "urls.tsv"


class UrlCache:
    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[str, str] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.rstrip("\n")
                    if not line or "\t" not in line:
                        continue
                    key, value = line.split("\t", 1)
                    self._entries[key] = value

    def __contains__(self, url):
        return url in self._entries

    def __len__(self):
        return len(self._entries)

    def get(self, url: str) -> str | None:
        return self._entries.get(url)

    def items(self):
        return self._entries.items()

    def put(self, url: str, resolved: str) -> None:
        if "\t" in url or "\n" in url or "\t" in resolved or "\n" in resolved:
            raise ValueError("URLs containing tabs or newlines cannot be cached")
        with self._lock:
            if self._entries.get(url) == resolved:
                return
            self._entries[url] = resolved
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                    fh.write(f"{url}\t{resolved}\n")


@dataclass
class HttpFetcher:
    """One redirect hop over HTTP: HEAD, falling back to GET on 405."""

    timeout: float = 10.0
    user_agent: str = "urlhawkes/0.1 (+url unshortener)"

    def __call__(self, url: str) -> tuple[int, str | None]:
        import requests

        headers = {"User-Agent": self.user_agent}
        try:
            resp = requests.head(url, allow_redirects=False, timeout=self.timeout, headers=headers)
            if resp.status_code == 405:
                resp = requests.get(url, allow_redirects=False, timeout=self.timeout, headers=headers, stream=True)
                resp.close()
        except requests.RequestException as exc:
            raise ResolutionError(f"request for {url} failed: {exc}") from exc
        return resp.status_code, resp.headers.get("Location")


def is_shortened(url: str) -> bool:
    try:
        host = url_host(url).lower()
    except CategorizationError:
        return False
    if host.startswith("www."):
        host = host[4:]
    return host in SHORTENER_HOSTS


def resolve_url(
    url: str,
    cache: UrlCache,
    fetch: Fetcher | None = None,
    offline: bool = True,
    max_redirects: int = MAX_REDIRECTS,
) -> str:
    """Expand ``url`` by following redirects, consulting ``cache`` first.

    URLs on non-shortener hosts are returned unchanged. In offline mode only
    the cache is consulted and a miss raises :class:`ResolutionError`.
    """
    if not is_shortened(url):
        return url
    hit = cache.get(url)
    if hit is not None:
        return hit
    if offline or fetch is None:
        raise ResolutionError(f"{url} not in cache and network resolution is disabled")
    current = url
    seen = {current}
    for _ in range(max_redirects):
        status, location = fetch(current)
        if not (300 <= status < 400 and location):
            break
        current = urljoin(current, location)
        if current in seen:
            raise ResolutionError(f"redirect loop at {current}")
        seen.add(current)
    else:
        status, location = fetch(current)
        if 300 <= status < 400 and location:
            raise ResolutionError(f"more than {max_redirects} redirects starting from {url}")
    cache.put(url, current)
    return current


def resolve_records(
    records: Iterable[EventRecord],
    cache: UrlCache,
    fetch: Fetcher | None = None,
    offline: bool = True,
    workers: int = 8,
) -> list[EventRecord]:
    """Resolve every record's URL; failures keep the raw URL with ``unresolved=True``.

    Distinct URLs are fetched on up to ``workers`` threads. Output order
    matches input order.
    """
    records = list(records)
    unique = list(dict.fromkeys(r.url for r in records))

    def one(url: str) -> str | None:
        try:
            return resolve_url(url, cache, fetch=fetch, offline=offline)
        except ResolutionError:
            return None

    if offline or workers <= 1:
        results = [one(u) for u in unique]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, unique))
    mapping = dict(zip(unique, results))
    out = []
    for r in records:
        resolved = mapping[r.url]
        if resolved is None:
            out.append(replace(r, resolved_url=None, unresolved=True))
        else:
            out.append(replace(r, resolved_url=resolved, unresolved=False))
    return out
