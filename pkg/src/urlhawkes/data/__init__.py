"""Bundled data files: platform taxonomy, 50-row sample log and its URL cache."""

from importlib import resources
from pathlib import Path


def _path(name: str) -> Path:
    return Path(str(resources.files(__name__).joinpath(name)))


def taxonomy_path() -> Path:
    return _path("taxonomy.tsv")


def sample_log_path() -> Path:
    return _path("sample_log.csv")


def sample_cache_path() -> Path:
    return _path("sample_cache.tsv")
