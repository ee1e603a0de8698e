"""ADM4 estimation of (A, mu) under nuclear-norm plus L1 penalties.

Each outer iteration builds the EM-style minorizer of the negative
log-likelihood at the current iterate. The base rates have a closed-form
update. The infectivity matrix is found by solving the penalized convex
surrogate with ADMM over two consensus copies of A: one copy takes
singular-value thresholding and the other takes the non-negative soft
threshold. Scaled duals are carried over between outer iterations. Because
each outer step minimizes a majorizer of the objective, accepted iterates
never increase it.

The penalty weights come from the level ``C`` and the mixing ratio as
``lambda1 = C * ratio`` (nuclear) and ``lambda2 = C * (1 - ratio)`` (L1).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .core import EventSequence, HawkesParams, kernel_states, log_likelihood

log = logging.getLogger(__name__)


class NonFiniteObjectiveError(FloatingPointError):
    def __init__(self, iteration: int, value: float):
        super().__init__(f"objective became {value} at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class FitConfig:
    omega: float
    C: float = 1000.0
    ratio: float = 0.5
    max_iter: int = 50
    tol: float = 1e-5
    admm_rho: float = 0.1
    init_seed: int = 0
    # False pins A at zero (pure Poisson fit).
    fit_excitation: bool = True
    max_admm_iter: int = 5000
    admm_tol: float = 1e-10

    def __post_init__(self):
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError("omega must be positive")
        if not (math.isfinite(self.C) and self.C >= 0):
            raise ValueError("C must be non-negative")
        if not 0.0 <= self.ratio <= 1.0:
            raise ValueError("ratio must lie in [0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.admm_rho > 0:
            raise ValueError("admm_rho must be positive")

    @property
    def lambda1(self) -> float:
        return self.C * self.ratio

    @property
    def lambda2(self) -> float:
        return self.C * (1.0 - self.ratio)


@dataclass(frozen=True)
class FitResult:
    params: HawkesParams
    objective_trace: tuple[float, ...]
    converged: bool
    iterations_run: int


def prox_l1_nonneg(X, threshold: float) -> np.ndarray:
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    return np.maximum(np.asarray(X, dtype=float) - threshold, 0.0)


def prox_nuclear(X, threshold: float) -> np.ndarray:
    """Singular-value thresholding."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    X = np.asarray(X, dtype=float)
    if threshold == 0:
        return X.copy()
    try:
        Uu, s, Vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise FloatingPointError(f"SVD failed: {exc}") from exc
    return (Uu * np.maximum(s - threshold, 0.0)) @ Vt


def check_convergence(trace: Sequence[float], tolerance: float) -> bool:
    if len(trace) < 2:
        return False
    prev, cur = trace[-2], trace[-1]
    return abs(cur - prev) / max(abs(prev), 1.0) < tolerance


class _Data:
    """Parameter-free sufficient statistics for a fixed decay."""

    def __init__(self, sequences: Sequence[EventSequence], omega: float):
        if not sequences:
            raise ValueError("need at least one sequence")
        U = sequences[0].U
        if any(s.U != U for s in sequences):
            raise ValueError("all sequences must share the same dimension count")
        self.U = U
        self.total_T = float(sum(s.T for s in sequences))
        nonempty = [s for s in sequences if len(s)]
        if not nonempty:
            raise ValueError("need at least one event")
        self.dims = np.concatenate([s.dims for s in nonempty])
        # omega * kernel state: the excitation seen by each event
        self.K = omega * np.concatenate([kernel_states(s, omega) for s in nonempty])
        tails = np.zeros(U)
        for s in nonempty:
            tails += np.bincount(s.dims, weights=-np.expm1(-omega * (s.T - s.times)), minlength=U)
        # B[u, v] = integrated kernel mass of all dim-v events
        self.B = np.tile(tails, (U, 1))
        self.n = self.dims.size
        self.counts = np.bincount(self.dims, minlength=U).astype(float)

    def intensities(self, mu, A):
        return mu[self.dims] + np.einsum("iv,iv->i", A[self.dims], self.K)

    def neg_loglik(self, mu, A) -> float:
        lam = self.intensities(mu, A)
        if np.any(lam < 1e-300):
            return math.inf
        return float(mu.sum() * self.total_T + (A * self.B).sum() - np.log(lam).sum())

    def responsibilities(self, mu, A):
        """Expected background counts per dim and triggered counts per (u, v)."""
        lam = self.intensities(mu, A)
        background = np.bincount(self.dims, weights=mu[self.dims] / lam, minlength=self.U)
        W = self.K / lam[:, None]
        S = np.stack([np.bincount(self.dims, weights=W[:, v], minlength=self.U) for v in range(self.U)], axis=1)
        return background, A * S


def _penalized(data: _Data, mu, A, lam1, lam2) -> float:
    value = data.neg_loglik(mu, A)
    if lam1:
        value += lam1 * np.linalg.svd(A, compute_uv=False).sum()
    if lam2:
        value += lam2 * A.sum()
    return value


class _Admm:
    """ADMM state for ``min sum(b*a - c*log a) + l1 ||A||_* + l2 ||A||_1, A >= 0``."""

    def __init__(self, A0, lam1, lam2, rho):
        self.rho = rho
        self.lam1, self.lam2 = lam1, lam2
        self.Z1 = A0.copy()
        self.Z2 = A0.copy()
        # Warm duals at subgradients of the penalties at A0.
        Uu, _, Vt = np.linalg.svd(A0)
        self.U1 = (lam1 / rho) * (Uu @ Vt)
        self.U2 = np.full_like(A0, lam2 / rho)

    def solve(self, b, c, max_iter, tol):
        rho = self.rho
        dim = b.size
        A = self.Z2
        for k in range(max_iter):
            q = b + rho * (self.U1 - self.Z1 + self.U2 - self.Z2)
            disc = np.sqrt(q * q + 8.0 * rho * c)
            with np.errstate(divide="ignore", invalid="ignore"):
                A = np.where(q > 0, 2.0 * c / (q + disc), (disc - q) / (4.0 * rho))
            Z1_prev, Z2_prev = self.Z1, self.Z2
            self.Z1 = prox_nuclear(A + self.U1, self.lam1 / rho)
            self.Z2 = prox_l1_nonneg(A + self.U2, self.lam2 / rho)
            self.U1 = self.U1 + A - self.Z1
            self.U2 = self.U2 + A - self.Z2
            primal = math.sqrt(((A - self.Z1) ** 2).sum() + ((A - self.Z2) ** 2).sum())
            dual = rho * math.sqrt(((self.Z1 - Z1_prev) ** 2).sum() + ((self.Z2 - Z2_prev) ** 2).sum())
            scale = max(np.linalg.norm(A), 1e-3)
            if primal <= tol * (math.sqrt(dim) + scale) and dual <= tol * (math.sqrt(dim) + scale):
                break
        return A, k + 1


def fit_adm4(
    sequences: Sequence[EventSequence],
    cfg: FitConfig,
    init: tuple[np.ndarray, np.ndarray] | None = None,
) -> FitResult:
    """Fit a penalized multivariate Hawkes model with fixed decay ``cfg.omega``."""
    if isinstance(sequences, EventSequence):
        sequences = [sequences]
    data = _Data(list(sequences), cfg.omega)
    U = data.U
    if init is None:
        mu = data.counts / data.total_T
        A = np.random.default_rng(cfg.init_seed).uniform(0.0, 0.1, size=(U, U))
    else:
        mu = np.array(init[0], dtype=float)
        A = np.array(init[1], dtype=float)
        if mu.shape != (U,) or A.shape != (U, U):
            raise ValueError("init has the wrong shape")
    if not cfg.fit_excitation:
        A = np.zeros((U, U))
    lam1, lam2 = cfg.lambda1, cfg.lambda2

    current = _penalized(data, mu, A, lam1, lam2)
    if not math.isfinite(current):
        raise NonFiniteObjectiveError(0, current)
    trace = [current]
    # The inner problem is divided by the event count so admm_rho is scale-free.
    scale = float(data.n)
    admm = _Admm(A, lam1 / scale, lam2 / scale, cfg.admm_rho) if cfg.fit_excitation else None
    converged = False

    for it in range(1, cfg.max_iter + 1):
        background, triggered = data.responsibilities(mu, A)
        mu_new = background / data.total_T
        if admm is None:
            A_new = A
            candidate = _penalized(data, mu_new, A_new, lam1, lam2)
        else:
            budget = cfg.max_admm_iter
            for _ in range(3):
                A_new, used = admm.solve(data.B / scale, triggered / scale, budget, cfg.admm_tol)
                A_new = np.maximum(A_new, 0.0)
                candidate = _penalized(data, mu_new, A_new, lam1, lam2)
                if candidate <= current:
                    break
                budget *= 2
        if math.isnan(candidate) or candidate == -math.inf:
            raise NonFiniteObjectiveError(it, candidate)
        if candidate <= current:
            mu, A, current = mu_new, A_new, candidate
        else:
            log.debug("iteration %d: no descent (%.12g > %.12g); keeping iterate", it, candidate, current)
        trace.append(current)
        if check_convergence(trace, cfg.tol):
            converged = True
            break

    params = HawkesParams(mu=np.maximum(mu, 0.0), A=A, omega=cfg.omega)
    return FitResult(params=params, objective_trace=tuple(trace), converged=converged, iterations_run=len(trace) - 1)


def select_decay(
    sequences: Sequence[EventSequence],
    cfg: FitConfig,
    candidates: Sequence[float],
    holdout_fraction: float = 0.2,
    seed: int = 0,
) -> tuple[float, dict[float, float]]:
    """Pick the decay with the best held-out log-likelihood.

    Sequences are split once with ``seed``; ties go to the smaller decay.
    """
    sequences = list(sequences)
    if len(sequences) < 2:
        raise ValueError("need at least two sequences to hold some out")
    if not candidates:
        raise ValueError("no candidate decays")
    order = np.random.default_rng(seed).permutation(len(sequences))
    n_hold = min(max(1, int(round(holdout_fraction * len(sequences)))), len(sequences) - 1)
    held = [sequences[i] for i in order[:n_hold]]
    train = [sequences[i] for i in order[n_hold:]]
    scores = {}
    for omega in sorted(float(w) for w in candidates):
        result = fit_adm4(train, replace(cfg, omega=omega))
        scores[omega] = log_likelihood(result.params, held)
    best = max(scores, key=lambda w: (scores[w], -w))
    return best, scores
