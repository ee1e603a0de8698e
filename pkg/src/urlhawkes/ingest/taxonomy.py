"""Mapping of resolved URLs onto the seven platform dimensions."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from importlib import resources
from urllib.parse import urlsplit

DIMENSIONS = ("Twitter", "Facebook", "Instagram", "Google", "Youtube", "Mainstream", "Alternatives")
TWITTER, FACEBOOK, INSTAGRAM, GOOGLE, YOUTUBE, MAINSTREAM, ALTERNATIVES = range(7)

_GOOGLE_CC = re.compile(r"(^|\.)google\.(com?\.)?[a-z]{2,3}$")


class CategorizationError(ValueError):
    pass


@dataclass(frozen=True)
class PlatformTaxonomy:
    domains: dict[str, int] = field(default_factory=dict)
    names: tuple[str, ...] = DIMENSIONS

    @property
    def mainstream(self) -> frozenset[str]:
        return frozenset(d for d, dim in self.domains.items() if dim == MAINSTREAM)

    def lookup_host(self, host: str) -> int:
        host = host.lower().rstrip(".")
        if host.startswith("www."):
            host = host[4:]
        labels = host.split(".")
        for i in range(len(labels) - 1):
            dim = self.domains.get(".".join(labels[i:]))
            if dim is not None:
                return dim
        if _GOOGLE_CC.search(host):
            return GOOGLE
        return ALTERNATIVES


def load_taxonomy(path: str | os.PathLike | None = None) -> PlatformTaxonomy:
    """Read a ``domain<TAB>dimension`` file; the bundled one by default."""
    if path is None:
        text = resources.files("urlhawkes.data").joinpath("taxonomy.tsv").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    domains: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1] not in DIMENSIONS:
            raise ValueError(f"taxonomy line {lineno}: expected 'domain<TAB>dimension', got {raw!r}")
        domain = parts[0].strip().lower()
        dim = DIMENSIONS.index(parts[1])
        if domains.get(domain, dim) != dim:
            raise ValueError(f"taxonomy line {lineno}: {domain} mapped to two dimensions")
        domains[domain] = dim
    return PlatformTaxonomy(domains)


def url_host(url: str) -> str:
    text = url.strip()
    if not text or any(c.isspace() for c in text):
        raise CategorizationError(f"unparseable URL {url!r}")
    if "://" not in text:
        text = "http://" + text
    try:
        host = urlsplit(text).hostname
    except ValueError as exc:
        raise CategorizationError(f"unparseable URL {url!r}: {exc}") from None
    if not host or "." not in host.strip("."):
        raise CategorizationError(f"URL {url!r} has no usable host")
    return host


def categorize_url(url: str, taxonomy: PlatformTaxonomy) -> int:
    return taxonomy.lookup_host(url_host(url))
