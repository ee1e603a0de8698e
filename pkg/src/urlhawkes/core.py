"""Exact evaluation of multivariate exponential-kernel Hawkes quantities.

Conventions used throughout the package:

* ``A[u, v]`` is the expected number of dimension-``u`` events triggered by a
  single dimension-``v`` event (row = destination, column = source).
* The kernel ``g(t) = omega * exp(-omega * t)`` has unit mass.
* Intensities are left-continuous: an event at exactly ``t`` does not
  contribute to ``lambda(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Intensities below this are treated as zero when taking logs.
LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class ExpKernel:
    """Unit-mass exponential decay kernel ``omega * exp(-omega * t)``."""

    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"omega must be a positive finite number, got {self.omega!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t >= 0, self.omega * np.exp(-self.omega * np.clip(t, 0, None)), 0.0)
        return out if out.ndim else float(out)

    def integral(self, t):
        """``G(t) = int_0^t g``; zero for negative ``t``."""
        t = np.asarray(t, dtype=float)
        out = np.where(t > 0, -np.expm1(-self.omega * np.clip(t, 0, None)), 0.0)
        return out if out.ndim else float(out)


@dataclass(frozen=True, eq=False)
class HawkesParams:
    """Base rates ``mu`` (U,), infectivity matrix ``A`` (U, U) and decay ``omega``."""

    mu: np.ndarray
    A: np.ndarray
    omega: float

    def __post_init__(self):
        mu = np.array(self.mu, dtype=float).reshape(-1)
        A = np.array(self.A, dtype=float)
        if mu.size < 1:
            raise ValueError("need at least one dimension")
        if A.shape != (mu.size, mu.size):
            raise ValueError(f"A has shape {A.shape}, expected {(mu.size, mu.size)}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(A))):
            raise ValueError("parameters must be finite")
        if np.any(mu < 0) or np.any(A < 0):
            raise ValueError("mu and A must be non-negative")
        ExpKernel(float(self.omega))
        mu.flags.writeable = False
        A.flags.writeable = False
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def U(self) -> int:
        return self.mu.size

    @property
    def kernel(self) -> ExpKernel:
        return ExpKernel(self.omega)

    def __eq__(self, other):
        if not isinstance(other, HawkesParams):
            return NotImplemented
        return (
            self.omega == other.omega
            and np.array_equal(self.mu, other.mu)
            and np.array_equal(self.A, other.A)
        )

    def to_dict(self) -> dict:
        return {
            "U": self.U,
            "omega": self.omega,
            "mu": self.mu.tolist(),
            "A": self.A.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HawkesParams":
        try:
            U, omega, mu, A = int(doc["U"]), doc["omega"], doc["mu"], doc["A"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed params document: {exc}") from exc
        params = cls(mu=mu, A=A, omega=omega)
        if params.U != U:
            raise ValueError(f"declared U={U} but mu has {params.U} entries")
        return params


@dataclass(frozen=True, eq=False)
class EventSequence:
    """One realization: strictly increasing ``times`` with dimension marks ``dims``."""

    times: np.ndarray
    dims: np.ndarray
    T: float
    U: int = field(default=0)

    def __post_init__(self):
        times = np.array(self.times, dtype=float).reshape(-1)
        dims = np.array(self.dims, dtype=np.int64).reshape(-1)
        T = float(self.T)
        if times.shape != dims.shape:
            raise ValueError("times and dims must have the same length")
        if not (math.isfinite(T) and T > 0):
            raise ValueError(f"horizon T must be positive, got {T!r}")
        if times.size:
            if not np.all(np.isfinite(times)) or times[0] < 0 or times[-1] > T:
                raise ValueError("event times must lie in [0, T]")
            if np.any(np.diff(times) <= 0):
                raise ValueError("event times must be strictly increasing")
        U = int(self.U) if self.U else (int(dims.max()) + 1 if dims.size else 1)
        if dims.size and (dims.min() < 0 or dims.max() >= U):
            raise ValueError(f"dimension marks must lie in [0, {U})")
        times.flags.writeable = False
        dims.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "U", U)

    def __len__(self):
        return self.times.size

    def __eq__(self, other):
        if not isinstance(other, EventSequence):
            return NotImplemented
        return (
            self.T == other.T
            and self.U == other.U
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.dims, other.dims)
        )

    def counts(self) -> np.ndarray:
        return np.bincount(self.dims, minlength=self.U)


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    return t


def intensity_1d(mu: float, a: float, kernel: ExpKernel, events: Sequence[float], t: float) -> float:
    """``mu + a * sum_{t_i < t} g(t - t_i)`` for a univariate process."""
    t = _check_time(t)
    if not (math.isfinite(mu) and math.isfinite(a)) or mu < 0 or a < 0:
        raise ValueError("mu and a must be non-negative and finite")
    ev = np.asarray(events, dtype=float)
    past = ev[ev < t]
    if past.size == 0 or a == 0:
        return float(mu)
    return float(mu + a * kernel.omega * np.exp(-kernel.omega * (t - past)).sum())


def _check_dim(params: HawkesParams, u: int) -> int:
    if not 0 <= int(u) < params.U:
        raise ValueError(f"dimension {u} out of range for U={params.U}")
    return int(u)


def intensity_mv(params: HawkesParams, seq: EventSequence, u: int, t: float) -> float:
    u = _check_dim(params, u)
    t = _check_time(t)
    mask = seq.times < t
    if not mask.any():
        return float(params.mu[u])
    lags = t - seq.times[mask]
    weights = params.A[u, seq.dims[mask]]
    return float(params.mu[u] + (weights * params.omega * np.exp(-params.omega * lags)).sum())


def compensator(params: HawkesParams, seq: EventSequence, u: int, t: float) -> float:
    """Closed-form ``int_0^t lambda_u(s) ds``."""
    u = _check_dim(params, u)
    t = _check_time(t)
    if t < 0 or t > seq.T:
        raise ValueError(f"t={t} outside [0, {seq.T}]")
    mask = seq.times < t
    lags = t - seq.times[mask]
    weights = params.A[u, seq.dims[mask]]
    return float(params.mu[u] * t + (weights * -np.expm1(-params.omega * lags)).sum())


def kernel_states(seq: EventSequence, omega: float) -> np.ndarray:
    """Row ``i`` holds ``sum_{j < i, u_j = v} exp(-omega (t_i - t_j))`` for every ``v``.

    Computed with the exponential recursion in O(n U).
    """
    n, U = len(seq), seq.U
    R = np.zeros((n, U))
    state = np.zeros(U)
    prev = 0.0
    times, dims = seq.times, seq.dims
    for i in range(n):
        state *= math.exp(-omega * (times[i] - prev))
        R[i] = state
        state[dims[i]] += 1.0
        prev = times[i]
    return R


def _ll_one(params: HawkesParams, seq: EventSequence) -> float:
    if seq.U != params.U:
        raise ValueError(f"sequence has U={seq.U}, params have U={params.U}")
    mu, A, omega = params.mu, params.A, params.omega
    integral = mu.sum() * seq.T
    if len(seq) == 0:
        return -float(integral)
    R = kernel_states(seq, omega)
    lam = mu[seq.dims] + omega * np.einsum("iv,iv->i", A[seq.dims], R)
    if np.any(lam < LOG_FLOOR):
        return -math.inf
    tails = -np.expm1(-omega * (seq.T - seq.times))
    integral += (A[:, seq.dims].sum(axis=0) * tails).sum()
    return float(np.log(lam).sum() - integral)


def log_likelihood(params: HawkesParams, sequences: Iterable[EventSequence]) -> float:
    """Total log-likelihood over independent sequences.

    Returns ``-inf`` when some event occurs where the intensity vanishes.
    """
    if isinstance(sequences, EventSequence):
        sequences = [sequences]
    total = 0.0
    for seq in sequences:
        ll = _ll_one(params, seq)
        if ll == -math.inf:
            return -math.inf
        total += ll
    return total


def _check_finite_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or not np.all(np.isfinite(A)):
        raise ValueError("expected a finite 2-D matrix")
    return A


def nuclear_norm(A) -> float:
    A = _check_finite_matrix(A)
    return float(np.linalg.svd(A, compute_uv=False).sum())


def objective(params: HawkesParams, sequences, lambda1: float, lambda2: float) -> float:
    """Penalized negative log-likelihood ``-L + l1 ||A||_* + l2 ||A||_1``."""
    value = -log_likelihood(params, sequences)
    if lambda1:
        value += lambda1 * nuclear_norm(params.A)
    if lambda2:
        value += lambda2 * np.abs(params.A).sum()
    return float(value)


def rescaled_residuals(params: HawkesParams, seq: EventSequence, u: int) -> np.ndarray:
    """Compensator increments between successive dimension-``u`` events.

    The first increment is measured from time zero.
    """
    u = _check_dim(params, u)
    if seq.U != params.U:
        raise ValueError(f"sequence has U={seq.U}, params have U={params.U}")
    idx = np.flatnonzero(seq.dims == u)
    if idx.size == 0:
        return np.empty(0)
    omega = params.omega
    # Lambda_u at each event time via the recursion on integrated kernels.
    R = kernel_states(seq, omega)
    n_before = np.zeros((len(seq), seq.U))
    counts = np.zeros(seq.U)
    for i, d in enumerate(seq.dims):
        n_before[i] = counts
        counts[d] += 1
    # sum_j (1 - exp(-omega (t_i - t_j))) per source = count - decayed count
    comp = params.mu[u] * seq.times + (n_before - R) @ params.A[u]
    return np.diff(np.concatenate([[0.0], comp[idx]]))


def branching_spectral_radius(A) -> float:
    A = _check_finite_matrix(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def pooled_rescaled_residuals(params: HawkesParams, sequences: Iterable[EventSequence], u: int) -> np.ndarray:
    """Residuals of several sequences on one chained rescaled clock.

    Sequence ``k``'s rescaled times are offset by the total compensator of
    sequences ``0..k-1``, so a gap spanning a sequence boundary is counted
    once instead of being dropped. Dropping those straddling gaps would bias
    pooled residuals short when the windows are brief.
    """
    u = _check_dim(params, u)
    offset = 0.0
    stamps = []
    for seq in sequences:
        res = rescaled_residuals(params, seq, u)
        stamps.append(offset + np.cumsum(res))
        offset += compensator(params, seq, u, seq.T)
    if not stamps:
        return np.empty(0)
    return np.diff(np.concatenate([[0.0], *stamps]))
