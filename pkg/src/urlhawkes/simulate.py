"""Ogata thinning sampler for exponential-kernel Hawkes processes.

Randomness comes from numpy's PCG64 bit generator seeded by
``numpy.random.SeedSequence(seed)``. Batch mode derives the stream for
sequence ``k`` as ``SeedSequence(seed, spawn_key=(k,))`` so that every
sequence is reproducible on its own and independent of the batch size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EventSequence, HawkesParams, branching_spectral_radius


class StabilityError(ValueError):
    """Raised when the infectivity matrix is critical or explosive."""

    def __init__(self, radius: float):
        super().__init__(f"spectral radius of A is {radius:.6g} >= 1; process is not stationary")
        self.radius = radius


class TruncationError(RuntimeError):
    """Raised when a run exceeds ``max_events``; carries the partial sequence."""

    def __init__(self, partial: EventSequence, max_events: int):
        super().__init__(f"simulation exceeded max_events={max_events}")
        self.partial = partial


@dataclass(frozen=True)
class SimConfig:
    T: float
    seed: int = 0
    max_events: int = 10_000_000

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError("horizon T must be positive")
        if self.max_events < 1:
            raise ValueError("max_events must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def sequence_rng(seed: int, k: int | None = None) -> np.random.Generator:
    """Generator for a single run (``k=None``) or for batch member ``k``."""
    ss = np.random.SeedSequence(int(seed)) if k is None else np.random.SeedSequence(int(seed), spawn_key=(k,))
    return np.random.Generator(np.random.PCG64(ss))


def _check_stable(params: HawkesParams):
    radius = branching_spectral_radius(params.A)
    if radius >= 1:
        raise StabilityError(radius)


def _thin(params: HawkesParams, cfg: SimConfig, rng: np.random.Generator) -> EventSequence:
    mu, A, omega, T = params.mu, params.A, params.omega, cfg.T
    U = params.U
    # excitation[v] = sum over past dim-v events of omega * exp(-omega (t - t_j))
    excitation = np.zeros(U)
    times: list[float] = []
    dims: list[int] = []
    t = 0.0
    lam = mu + A @ excitation
    while True:
        bound = lam.sum()
        if bound <= 0:
            break
        t_new = t + rng.exponential(1.0 / bound)
        if t_new > T:
            break
        excitation *= math.exp(-omega * (t_new - t))
        t = t_new
        lam = mu + A @ excitation
        total = lam.sum()
        if rng.random() * bound <= total:
            u = int(np.searchsorted(np.cumsum(lam), rng.random() * total, side="right"))
            u = min(u, U - 1)
            if len(times) >= cfg.max_events:
                raise TruncationError(EventSequence(times, dims, T, U), cfg.max_events)
            times.append(t)
            dims.append(u)
            excitation[u] += omega
            lam = mu + A @ excitation
    return EventSequence(times, dims, T, U)


def simulate(params: HawkesParams, cfg: SimConfig, rng: np.random.Generator | None = None) -> EventSequence:
    _check_stable(params)
    return _thin(params, cfg, rng if rng is not None else sequence_rng(cfg.seed))


def simulate_batch(params: HawkesParams, cfg: SimConfig, count: int) -> list[EventSequence]:
    if count < 1:
        raise ValueError("count must be positive")
    _check_stable(params)
    return [_thin(params, cfg, sequence_rng(cfg.seed, k)) for k in range(count)]
