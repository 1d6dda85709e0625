import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scenario_ucb.errors import ContractViolation
from scenario_ucb.gp import REFACTOR_EVERY, GpState, Observation, batch_posterior, gp_predict, gp_ucb_value, gp_update
from scenario_ucb.kernel import Grid, KernelSpec, kernel_matrix


def direct_posterior(K, idx, y, rho2):
    """Posterior by literal evaluation of the conditioning formulas with an explicit inverse."""
    idx = list(idx)
    if not idx:
        return np.zeros(K.shape[0]), np.sqrt(np.diag(K))
    inv = np.linalg.inv(K[np.ix_(idx, idx)] + rho2 * np.eye(len(idx)))
    mu = np.array([K[idx, x] @ inv @ y for x in range(K.shape[0])])
    var = np.array([K[x, x] - K[idx, x] @ inv @ K[idx, x] for x in range(K.shape[0])])
    return mu, np.sqrt(np.maximum(var, 0))


@pytest.fixture
def grid():
    return Grid.arange(0.0, 1.0, 0.05)


def test_prior(grid):
    s = GpState(KernelSpec(), grid, 0.01)
    np.testing.assert_array_equal(s.posterior_mean, 0.0)
    np.testing.assert_array_equal(s.posterior_sigma, 1.0)
    assert gp_predict(s, 3) == (0.0, 1.0)


def test_single_observation_closed_form(grid):
    s = gp_update(GpState(KernelSpec(), grid, 0.01), Observation(4, 1.0, 1))
    mu, sigma = gp_predict(s, 4)
    assert mu == pytest.approx(1 / 1.01, abs=1e-12)
    assert sigma**2 == pytest.approx(0.01 / 1.01, abs=1e-12)
    assert (mu, sigma) == pytest.approx((0.990099, 0.099504), abs=1e-6)


def test_far_point_stays_at_prior():
    grid = Grid([0.0, 0.9])
    s = gp_update(GpState(KernelSpec(), grid, 0.01), Observation(0, 1.0))
    mu, sigma = gp_predict(s, 1)
    assert mu == pytest.approx(0.0, abs=1e-12)
    assert sigma == pytest.approx(1.0, abs=1e-12)


def test_two_updates_match_batch(grid):
    s = GpState(KernelSpec(delta=0.4), grid, 0.01)
    s.update(Observation(2, 0.3)).update(Observation(3, -0.7))
    mu, sd = direct_posterior(s.K, [2, 3], np.array([0.3, -0.7]), 0.01)
    np.testing.assert_allclose(s.posterior_mean, mu, atol=1e-9)
    np.testing.assert_allclose(s.posterior_sigma, sd, atol=1e-9)


def test_batch_reference_agrees_with_explicit_inverse(grid):
    K = kernel_matrix(KernelSpec(), grid)
    idx = [0, 5, 5, 9]
    y = np.array([0.1, 0.2, 0.25, -1.0])
    a = batch_posterior(K, idx, y, 0.01)
    b = direct_posterior(K, idx, y, 0.01)
    np.testing.assert_allclose(a[0], b[0], atol=1e-10)
    np.testing.assert_allclose(a[1], b[1], atol=1e-10)


def test_repeated_point_is_allowed(grid):
    s = GpState(KernelSpec(), grid, 0.01)
    for y in (1.0, 1.2, 0.8):
        s.update(Observation(7, y))
    mu, sd = direct_posterior(s.K, [7, 7, 7], np.array([1.0, 1.2, 0.8]), 0.01)
    np.testing.assert_allclose(s.posterior_mean, mu, atol=1e-10)
    np.testing.assert_allclose(s.posterior_sigma, sd, atol=1e-10)


def test_refactorization_keeps_exactness():
    grid = Grid.arange(0.0, 1.0, 0.05)
    rng = np.random.default_rng(3)
    s = GpState(KernelSpec(delta=0.2), grid, 0.01)
    idx = rng.integers(0, len(grid), size=3 * REFACTOR_EVERY + 5)
    y = rng.normal(size=idx.size)
    for x, v in zip(idx, y):
        s.update(Observation(int(x), float(v)))
    mu, sd = batch_posterior(s.K, idx, y, 0.01)
    np.testing.assert_allclose(s.posterior_mean, mu, atol=1e-8)
    np.testing.assert_allclose(s.posterior_sigma, sd, atol=1e-8)


def test_noise_free_interpolation():
    grid = Grid.arange(0.0, 1.0, 0.1)
    s = GpState(KernelSpec(), grid, 1e-10)
    ys = {1: 0.5, 4: -1.3, 8: 2.0}
    for x, y in ys.items():
        s.update(Observation(x, y))
    for x, y in ys.items():
        assert abs(s.posterior_mean[x] - y) <= 1e-4


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 20), st.floats(-3, 3)), min_size=1, max_size=30), st.floats(0, 1))
def test_variance_monotone_and_batch_equivalent(obs, delta):
    grid = Grid.arange(0.0, 1.0, 0.05)
    s = GpState(KernelSpec(delta=delta), grid, 0.01)
    prev = s.posterior_sigma.copy()
    for x, y in obs:
        s.update(Observation(x, y))
        assert np.all(s.posterior_sigma <= prev + 1e-9)
        assert np.all(s.posterior_sigma >= 0)
        prev = s.posterior_sigma.copy()
    mu, sd = batch_posterior(s.K, [o[0] for o in obs], [o[1] for o in obs], 0.01)
    np.testing.assert_allclose(s.posterior_mean, mu, atol=1e-8)
    np.testing.assert_allclose(s.posterior_sigma, sd, atol=1e-8)


def test_gaussian_calibration():
    grid = Grid.arange(0.0, 1.0, 0.1)
    K = kernel_matrix(KernelSpec(), grid)
    L = np.linalg.cholesky(K + 1e-10 * np.eye(len(grid)))
    rng = np.random.default_rng(11)
    rho2 = 0.05
    z = []
    obs_idx = [0, 3, 4, 9]
    for _ in range(2500):
        f = L @ rng.standard_normal(len(grid))
        s = GpState(KernelSpec(), grid, rho2)
        for x in obs_idx:
            s.update(Observation(x, f[x] + rng.normal(0, math.sqrt(rho2))))
        z.extend(((f - s.posterior_mean) / s.posterior_sigma).tolist())
    z = np.array(z)
    assert z.size >= 10_000
    assert abs(z.mean()) < 0.05
    assert abs(z.var() - 1) < 0.1


class TestUcb:
    def test_prior(self, grid):
        assert gp_ucb_value(GpState(KernelSpec(), grid, 0.01), 0, 4.0) == 2.0

    def test_after_update(self, grid):
        s = gp_update(GpState(KernelSpec(), grid, 0.01), Observation(4, 1.0))
        expected = 1 / 1.01 + math.sqrt(16.217) * math.sqrt(0.01 / 1.01)
        assert gp_ucb_value(s, 4, 16.217) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(1.390804, abs=1e-6)

    def test_arithmetic(self, grid):
        s = GpState(KernelSpec(), grid, 0.01)
        s._mean[0], s._sigma[0] = 0.5, 0.2
        assert gp_ucb_value(s, 0, 9.0) == pytest.approx(1.1)

    def test_contracts(self, grid):
        s = GpState(KernelSpec(), grid, 0.01)
        with pytest.raises(ContractViolation):
            gp_ucb_value(s, 0, -1.0)
        with pytest.raises(ContractViolation):
            gp_predict(s, len(grid))
        with pytest.raises(ContractViolation):
            GpState(KernelSpec(), grid, 0.0)


def test_cached_arrays_are_read_only(grid):
    s = GpState(KernelSpec(), grid, 0.01)
    with pytest.raises(ValueError):
        s.posterior_mean[0] = 1.0
