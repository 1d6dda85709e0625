import math

import numpy as np
import pytest

from scenario_ucb.env import GroundTruth, synthesize, synthesize_batch
from scenario_ucb.errors import ContractViolation
from scenario_ucb.kernel import Grid, KernelSpec, kernel_matrix
from scenario_ucb.scenario import Scenario, ScenarioSet


def make_gt(values, rho2, seed=0):
    values = np.atleast_2d(values)
    grid = Grid(np.linspace(0, 1, values.shape[1]))
    ss = ScenarioSet(tuple(Scenario(i, 0.5, v) for i, v in enumerate(values)), 0)
    return GroundTruth(grid, ss, rho2, seed)


def test_synthesize_is_deterministic():
    grid = Grid.arange(0, 1, 0.01)
    a = synthesize(0.3, grid, 42)
    b = synthesize(0.3, grid, 42)
    assert a.tobytes() == b.tobytes()
    assert a.shape == (101,)


def test_synthesize_moments_and_correlation():
    grid = Grid([0.0, 0.05, 0.5])
    samples = np.array([synthesize(0.0, grid, s) for s in range(10_000)])
    assert np.all(np.abs(samples.mean(axis=0)) < 0.05)
    assert np.all(np.abs(samples.var(axis=0) - 1) < 0.1)
    r = np.corrcoef(samples[:, 0], samples[:, 1])[0, 1]
    assert abs(r - math.exp(-1)) < 0.05


def test_batch_covariance_matches_kernel_matrix():
    grid = Grid([0.0, 0.04, 0.1])
    spec = KernelSpec(delta=0.5)
    draws = synthesize_batch(np.full(100_000, 0.5), grid, np.random.default_rng(1), spec)
    np.testing.assert_allclose(np.cov(draws.T), kernel_matrix(spec, grid), atol=0.05)


def test_noiseless_query_equals_truth():
    gt = make_gt([[0.1, -0.4, 2.0]], 0.0)
    assert gt.query(1, 0) == gt.truth(1, 0) == -0.4


def test_query_noise_moments():
    gt = make_gt([[0.1, -0.4, 2.0]], 0.04, seed=3)
    ys = np.array([gt.query(2, 0) for _ in range(10_000)])
    assert abs(ys.var() / 0.04 - 1) < 0.05
    assert abs(ys.mean() - 2.0) < 3 * 0.2 / 100


def test_truth_is_pure_and_stores_realization():
    grid = Grid.arange(0, 1, 0.1)
    f = synthesize(0.2, grid, 8)
    gt = GroundTruth(grid, ScenarioSet((Scenario(0, 0.2, f),), 0), 0.01, 0)
    assert gt.truth(4, 0) == gt.truth(4, 0) == f[4]
    state = gt.rng.bit_generator.state
    gt.truth(5, 0)
    assert gt.rng.bit_generator.state == state


def test_query_advances_only_noise():
    gt = make_gt([[0.0, 1.0]], 0.01, seed=5)
    table = gt.truth_table().copy()
    gt.query(0, 0)
    np.testing.assert_array_equal(gt.truth_table(), table)


def test_access_counters_and_blackbox_view():
    gt = make_gt([[0.0, 1.0], [2.0, 3.0]], 0.01)
    bb = gt.blackbox()
    bb.query(1, 1)
    assert gt.n_queries == 1 and gt.n_truth_reads == 0
    assert not hasattr(bb, "truth")
    assert bb.n_scenarios == 2


def test_contracts():
    gt = make_gt([[0.0, 1.0]], 0.01)
    with pytest.raises(ContractViolation):
        gt.query(0, 1)
    with pytest.raises(ContractViolation):
        gt.truth(2, 0)
    with pytest.raises(ContractViolation):
        GroundTruth(Grid([0, 1]), ScenarioSet((Scenario(0, 0.1, None),), 0), 0.01)
