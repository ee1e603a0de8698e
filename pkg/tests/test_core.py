import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import ortho_group

from oracles import naive_loglik, quadrature_loglik, random_instance
from urlhawkes.core import (
    EventSequence,
    ExpKernel,
    HawkesParams,
    branching_spectral_radius,
    compensator,
    intensity_1d,
    intensity_mv,
    log_likelihood,
    nuclear_norm,
    objective,
    rescaled_residuals,
)


def params(mu, A, omega=1.0):
    return HawkesParams(mu=mu, A=A, omega=omega)


class TestExpKernel:
    def test_unit_mass(self):
        from scipy.integrate import quad

        k = ExpKernel(2.5)
        mass, _ = quad(k, 0, np.inf)
        assert mass == pytest.approx(1.0, rel=1e-10)

    def test_zero_before_origin(self):
        assert ExpKernel(1.0)(-0.5) == 0.0

    @pytest.mark.parametrize("omega", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_bad_decay(self, omega):
        with pytest.raises(ValueError):
            ExpKernel(omega)


class TestIntensity1d:
    def test_no_history(self):
        assert intensity_1d(0.5, 0.2, ExpKernel(1.0), [], 3.0) == 0.5

    def test_single_event(self):
        # mpmath, 30 digits
        assert intensity_1d(0.5, 0.2, ExpKernel(1.0), [0.0], 1.0) == pytest.approx(0.573575888234288464, rel=1e-14)

    def test_zero_coupling(self):
        assert intensity_1d(0.5, 0.0, ExpKernel(1.0), [0.1, 0.2], 1.0) == 0.5

    def test_event_at_t_excluded(self):
        assert intensity_1d(0.5, 0.2, ExpKernel(1.0), [1.0], 1.0) == 0.5

    @pytest.mark.parametrize("t", [math.nan, math.inf])
    def test_non_finite_time(self, t):
        with pytest.raises(ValueError):
            intensity_1d(0.5, 0.2, ExpKernel(1.0), [], t)

    def test_negative_params(self):
        with pytest.raises(ValueError):
            intensity_1d(-0.1, 0.2, ExpKernel(1.0), [], 1.0)


class TestIntensityMv:
    def test_zero_coupling(self):
        p = params([0.3, 0.7], np.zeros((2, 2)))
        seq = EventSequence([0.2, 1.0], [0, 1], 5.0, 2)
        assert intensity_mv(p, seq, 1, 3.3) == 0.7

    def test_cross_excitation(self):
        p = params([0.0, 0.0], [[0.0, 0.5], [0.0, 0.0]], omega=2.0)
        seq = EventSequence([0.0], [1], 1.0, 2)
        assert intensity_mv(p, seq, 0, 0.5) == pytest.approx(0.367879441171442322, rel=1e-14)
        assert intensity_mv(p, seq, 1, 0.5) == 0.0

    def test_out_of_range(self):
        p = params([0.1, 0.1], np.zeros((2, 2)))
        with pytest.raises(ValueError):
            intensity_mv(p, EventSequence([], [], 1.0, 2), 2, 0.5)

    def test_lower_bounded_by_base_rate(self):
        rng = np.random.default_rng(3)
        mu, A, omega, times, dims, T = random_instance(rng, 3, 40)
        p, seq = params(mu, A, omega), EventSequence(times, dims, T, 3)
        for t in rng.uniform(0, T, size=30):
            for u in range(3):
                assert intensity_mv(p, seq, u, t) >= mu[u]


class TestCompensator:
    def test_poisson(self):
        p = params([1.0], [[0.0]])
        assert compensator(p, EventSequence([0.5], [0], 3.0, 1), 0, 2.5) == 2.5

    def test_closed_form(self):
        p = params([1.0], [[0.5]], omega=2.0)
        seq = EventSequence([0.0], [0], 2.0, 1)
        assert compensator(p, seq, 0, 1.0) == pytest.approx(1.43233235838169365, rel=1e-14)

    def test_zero_at_origin(self):
        p = params([1.3, 0.2], [[0.4, 0.1], [0.2, 0.3]], omega=1.5)
        seq = EventSequence([0.0, 0.4], [0, 1], 2.0, 2)
        assert compensator(p, seq, 0, 0.0) == 0.0
        assert compensator(p, seq, 1, 0.0) == 0.0

    def test_outside_window(self):
        p = params([1.0], [[0.0]])
        seq = EventSequence([], [], 2.0, 1)
        with pytest.raises(ValueError):
            compensator(p, seq, 0, 2.5)
        with pytest.raises(ValueError):
            compensator(p, seq, 0, -0.1)

    def test_monotone_and_matches_quadrature(self):
        from scipy.integrate import quad

        rng = np.random.default_rng(11)
        mu, A, omega, times, dims, T = random_instance(rng, 2, 25)
        p, seq = params(mu, A, omega), EventSequence(times, dims, T, 2)
        grid = np.linspace(0, T, 60)
        for u in range(2):
            vals = [compensator(p, seq, u, t) for t in grid]
            assert np.all(np.diff(vals) >= 0)
            knots = np.concatenate([[0.0], times[times < grid[37]], [grid[37]]])
            ref = sum(quad(lambda s: intensity_mv(p, seq, u, s), a, b)[0] for a, b in zip(knots[:-1], knots[1:]))
            assert vals[37] == pytest.approx(ref, rel=1e-9)


class TestLogLikelihood:
    def test_poisson_closed_form(self):
        p = params([2.0], [[0.0]])
        assert log_likelihood(p, [EventSequence([0.5], [0], 1.0, 1)]) == pytest.approx(math.log(2) - 2, rel=1e-15)

    def test_quadrature_example(self):
        p = params([0.5], [[0.2]], omega=1.0)
        seq = EventSequence([0.3, 1.1], [0, 0], 2.0, 1)
        ref = quadrature_loglik([0.5], [[0.2]], 1.0, [0.3, 1.1], [0, 0], 2.0)
        assert log_likelihood(p, [seq]) == pytest.approx(ref, rel=1e-8)

    def test_empty(self):
        assert log_likelihood(params([1.0], [[0.3]]), [EventSequence([], [], 3.0, 1)]) == -3.0

    def test_zero_intensity_is_negative_infinity(self):
        p = params([0.0, 1.0], np.zeros((2, 2)))
        assert log_likelihood(p, [EventSequence([0.5], [0], 1.0, 2)]) == -math.inf

    def test_poisson_decomposition(self):
        rng = np.random.default_rng(5)
        mu, _, omega, times, dims, T = random_instance(rng, 3, 60)
        seq = EventSequence(times, dims, T, 3)
        n = seq.counts()
        expected = sum(n[u] * math.log(mu[u]) - mu[u] * T for u in range(3))
        assert log_likelihood(params(mu, np.zeros((3, 3)), omega), [seq]) == pytest.approx(expected, rel=1e-12)

    def test_sums_over_sequences(self):
        rng = np.random.default_rng(8)
        mu, A, omega, t1, d1, T1 = random_instance(rng, 2, 30)
        _, _, _, t2, d2, T2 = random_instance(rng, 2, 30)
        p = params(mu, A, omega)
        s1, s2 = EventSequence(t1, d1, T1, 2), EventSequence(t2, d2, T2, 2)
        assert log_likelihood(p, [s1, s2]) == pytest.approx(log_likelihood(p, [s1]) + log_likelihood(p, [s2]))

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_naive(self, seed):
        rng = np.random.default_rng(100 + seed)
        U = int(rng.integers(1, 5))
        mu, A, omega, times, dims, T = random_instance(rng, U, 150)
        got = log_likelihood(params(mu, A, omega), [EventSequence(times, dims, T, U)])
        assert got == pytest.approx(naive_loglik(mu, A, omega, times, dims, T), rel=1e-10)


class TestNuclearNorm:
    def test_identity(self):
        assert nuclear_norm(np.eye(2)) == pytest.approx(2.0)

    def test_diagonal(self):
        assert nuclear_norm(np.diag([3.0, 4.0])) == pytest.approx(7.0)

    def test_shear(self):
        # singular values sqrt((3 +- sqrt 5)/2) sum to sqrt 5
        assert nuclear_norm([[1.0, 1.0], [0.0, 1.0]]) == pytest.approx(math.sqrt(5), rel=1e-14)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            nuclear_norm([[1.0, math.nan], [0.0, 1.0]])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**31 - 1))
    def test_rotation_invariance(self, n, seed):
        rng = np.random.default_rng(seed)
        Q = ortho_group.rvs(n, random_state=rng) if n > 1 else np.array([[1.0]])
        R = ortho_group.rvs(n, random_state=rng) if n > 1 else np.array([[-1.0]])
        D = rng.uniform(0, 5, size=n)
        assert nuclear_norm(Q @ np.diag(D) @ R.T) == pytest.approx(D.sum(), abs=1e-9)


class TestObjective:
    @pytest.fixture
    def data(self):
        rng = np.random.default_rng(21)
        mu, A, omega, times, dims, T = random_instance(rng, 2, 40)
        return mu, omega, EventSequence(times, dims, T, 2), (times, dims, T)

    def test_unpenalized_is_exact(self, data):
        mu, omega, seq, _ = data
        p = params(mu, [[0.2, 0.1], [0.05, 0.3]], omega)
        assert objective(p, [seq], 0.0, 0.0) == -log_likelihood(p, [seq])

    def test_zero_matrix(self, data):
        mu, omega, seq, _ = data
        p = params(mu, np.zeros((2, 2)), omega)
        n = seq.counts()
        poisson = sum(n[u] * math.log(mu[u]) - mu[u] * seq.T for u in range(2))
        assert objective(p, [seq], 3.0, 7.0) == pytest.approx(-poisson, rel=1e-12)

    def test_penalties(self, data):
        mu, omega, seq, (times, dims, T) = data
        A = np.diag([0.5, 0.5])
        ll = quadrature_loglik(mu, A, omega, times, dims, T)
        assert objective(params(mu, A, omega), [seq], 1.0, 1.0) == pytest.approx(-ll + 1.0 + 1.0, rel=1e-8)


class TestResiduals:
    def test_poisson_gaps(self):
        seq = EventSequence([0.5, 1.25, 3.0], [0, 0, 0], 4.0, 1)
        res = rescaled_residuals(params([1.0], [[0.0]]), seq, 0)
        np.testing.assert_allclose(res, [0.5, 0.75, 1.75])

    def test_single_event(self):
        res = rescaled_residuals(params([2.0], [[0.0]]), EventSequence([1.0], [0], 2.0, 1), 0)
        np.testing.assert_allclose(res, [2.0])

    def test_agree_with_compensator(self):
        rng = np.random.default_rng(4)
        mu, A, omega, times, dims, T = random_instance(rng, 3, 50)
        p, seq = params(mu, A, omega), EventSequence(times, dims, T, 3)
        for u in range(3):
            ev = times[dims == u]
            expected = np.diff([0.0] + [compensator(p, seq, u, t) for t in ev])
            np.testing.assert_allclose(rescaled_residuals(p, seq, u), expected, rtol=1e-12, atol=1e-12)


class TestSpectralRadius:
    def test_zero(self):
        assert branching_spectral_radius(np.zeros((3, 3))) == 0.0

    def test_diagonal(self):
        assert branching_spectral_radius(np.diag([0.5, 0.8])) == pytest.approx(0.8)

    def test_symmetric(self):
        # eigenvalues 0.2 +- 0.3
        assert branching_spectral_radius([[0.2, 0.3], [0.3, 0.2]]) == pytest.approx(0.5)


class TestTypes:
    def test_params_validation(self):
        with pytest.raises(ValueError):
            params([0.1, -0.2], np.zeros((2, 2)))
        with pytest.raises(ValueError):
            params([0.1, 0.2], np.zeros((3, 3)))
        with pytest.raises(ValueError):
            params([0.1], [[-0.1]])

    def test_params_json_roundtrip(self):
        p = params([0.1, 0.2], [[0.3, 0.0], [0.2, 0.25]], omega=1.5)
        doc = p.to_dict()
        assert doc == {"U": 2, "omega": 1.5, "mu": [0.1, 0.2], "A": [[0.3, 0.0], [0.2, 0.25]]}
        assert HawkesParams.from_dict(doc) == p

    def test_sequence_validation(self):
        with pytest.raises(ValueError):
            EventSequence([1.0, 1.0], [0, 1], 2.0, 2)
        with pytest.raises(ValueError):
            EventSequence([1.0, 3.0], [0, 1], 2.0, 2)
        with pytest.raises(ValueError):
            EventSequence([1.0], [2], 2.0, 2)
        with pytest.raises(ValueError):
            EventSequence([], [], 0.0, 2)

    def test_immutable(self):
        seq = EventSequence([0.1], [0], 1.0, 1)
        with pytest.raises(ValueError):
            seq.times[0] = 0.2
