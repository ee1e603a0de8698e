"""Deterministic CSV/JSON writers: 9 significant digits, LF line endings."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from typing import Any, Iterable, Sequence

import numpy as np


def fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
        if value == 0:
            return "0"
        return format(value, ".9g")
    return str(value)


def write_csv(path: str | os.PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def round_floats(obj: Any) -> Any:
    """Round every float in a JSON-like structure to 9 significant digits."""
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value) or value == 0:
            return 0.0 if value == 0 else value
        return float(format(value, ".9g"))
    return obj


def write_json(path: str | os.PathLike, doc: Any) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(round_floats(doc), fh, indent=2, sort_keys=False, ensure_ascii=False)
        fh.write("\n")


def sha256_file(path: str | os.PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
