"""Matplotlib renderings of the exported tables.

All figures use the Agg backend and strip the software tag from PNG metadata
so that repeated runs give identical files.
"""

from __future__ import annotations

import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
}


def _save(fig, path: str | os.PathLike) -> None:
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_infectivity(A: np.ndarray, names: Sequence[str], path, title: str = "") -> None:
    """Heatmap with sources on rows and destinations on columns."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.2, 4.4))
        M = np.asarray(A).T
        im = ax.imshow(M, cmap="viridis", origin="upper")
        ax.set_xticks(range(len(names)), [f"→ {n}" for n in names], rotation=45, ha="right")
        ax.set_yticks(range(len(names)), [f"{n} →" for n in names])
        for (i, j), w in np.ndenumerate(M):
            ax.text(j, i, f"{w:.2g}" if w else "0", ha="center", va="center", fontsize=6,
                    color="white" if w < 0.6 * M.max() else "black")
        fig.colorbar(im, ax=ax, shrink=0.8, label="weight")
        if title:
            ax.set_title(title)
        _save(fig, path)


def plot_size_distribution(hist: Sequence[tuple[int, int]], path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 3))
        if hist:
            sizes, counts = zip(*hist)
            ax.loglog(sizes, counts, "o", ms=3)
        ax.set_xlabel("cascade size")
        ax.set_ylabel("number of cascades")
        _save(fig, path)


def plot_duration_cdf(cdf: Sequence[tuple[float, float]], path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 3))
        if cdf:
            d, f = zip(*cdf)
            ax.step(d, f, where="post")
        ax.set_xlabel("duration (s)")
        ax.set_ylabel("fraction of cascades")
        ax.set_ylim(0, 1.02)
        _save(fig, path)


def plot_suspended(cascade_ids: Sequence[str], counts: Sequence[int], path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4, 3))
        ax.bar(range(len(counts)), counts, width=1.0)
        ax.set_xlabel("cascade")
        ax.set_ylabel("suspended users")
        _save(fig, path)


def plot_daily_pairs(rows: Sequence[tuple[str, int, int]], path) -> None:
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 3))
        if rows:
            x = np.arange(len(rows))
            ax.plot(x, [r[1] for r in rows], label="PSM")
            ax.plot(x, [r[2] for r in rows], label="normal")
            step = max(1, len(rows) // 8)
            ax.set_xticks(x[::step], [r[0] for r in rows][::step], rotation=45, ha="right")
            ax.legend()
        ax.set_ylabel("paired URLs per day")
        _save(fig, path)
