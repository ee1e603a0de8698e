"""Independent reference computations used by the tests.

Nothing here calls into the recursion used by the library; intensities are
direct double sums and integrals go through scipy's adaptive quadrature.
"""

import math

import numpy as np
from scipy import integrate


def direct_intensity(mu, A, omega, times, dims, u, t):
    times = np.asarray(times, dtype=float)
    mask = times < t
    weights = np.asarray(A)[u, np.asarray(dims)[mask]]
    return float(mu[u] + np.sum(weights * omega * np.exp(-omega * (t - times[mask]))))


def naive_loglik(mu, A, omega, times, dims, T):
    """O(n^2) double sum plus closed-form compensator."""
    U = len(mu)
    ll = 0.0
    for i, (ti, ui) in enumerate(zip(times, dims)):
        lam = mu[ui]
        for j in range(i):
            lam += A[ui][dims[j]] * omega * math.exp(-omega * (ti - times[j]))
        ll += math.log(lam)
    for u in range(U):
        comp = mu[u] * T
        for tj, v in zip(times, dims):
            comp += A[u][v] * (1.0 - math.exp(-omega * (T - tj)))
        ll -= comp
    return ll


def quadrature_loglik(mu, A, omega, times, dims, T):
    """Log intensities by direct sum; the integral by adaptive quadrature per inter-event gap."""
    U = len(mu)
    ll = sum(math.log(direct_intensity(mu, A, omega, times, dims, u, t)) for t, u in zip(times, dims))
    knots = [0.0] + list(times) + [T]
    for u in range(U):
        for a, b in zip(knots[:-1], knots[1:]):
            if b > a:
                val, _ = integrate.quad(
                    lambda s: direct_intensity(mu, A, omega, times, dims, u, s), a, b, epsabs=0, epsrel=1e-13, limit=200
                )
                ll -= val
    return ll


def random_instance(rng, U, n_max, T=None):
    n = int(rng.integers(1, n_max + 1))
    T = float(T if T is not None else rng.uniform(5.0, 50.0))
    times = np.sort(rng.uniform(0, T, size=n))
    dims = rng.integers(0, U, size=n)
    mu = rng.uniform(0.05, 1.0, size=U)
    A = rng.uniform(0.0, 0.6, size=(U, U))
    omega = float(rng.uniform(0.2, 3.0))
    return mu, A, omega, times, dims, T
