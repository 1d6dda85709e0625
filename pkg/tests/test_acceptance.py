"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import math

import numpy as np
import pytest

from scenario_ucb.algo import RunTrace
from scenario_ucb.config import ExperimentConfig
from scenario_ucb.experiment import shape_checks, simulate, sweep
from scenario_ucb.gp import GpState, Observation
from scenario_ucb.io import CURVE_HEADER, TRACE_HEADER, curve_rows, trace_rows, write_csv
from scenario_ucb.kernel import Grid, KernelSpec
from scenario_ucb.regret import solve_scenario
from scenario_ucb.scenario import (
    RedrawSchedule,
    sample_count_corollary1,
    sample_count_redraw,
    sample_count_theorem2,
)
from scenario_ucb.validation import (
    bound_suite,
    concentration_suite,
    oracle_suite,
    robustness_suite,
    run_population,
    violation_suite,
)

pytestmark = pytest.mark.slow


def small_config(**overrides) -> ExperimentConfig:
    cfg = ExperimentConfig()
    cfg.grid_step = 0.1
    cfg.n_scenarios = "3"
    for k, v in overrides.items():
        setattr(cfg, k, v)
    return cfg.validate()


# -- 1: qualitative shape of the regret curves ------------------------------


@pytest.fixture(scope="module")
def default_sweep():
    cfg = ExperimentConfig()
    cfg.repetitions = 20
    cfg.seed = 0
    return sweep(cfg.validate(), [0.1, 0.4, 1.0])


def _shape(summary, which):
    checks = shape_checks(summary, early_t=100, mid_t=200, final_t=1000)
    return next(c for c in checks if which in c[0])


def test_c1a_regret_below_half_by_t100(default_sweep, verdict):
    name, ok, detail = _shape(default_sweep, "below 0.5")
    assert verdict("criterion 1a (mean regret < 0.5 at t=100, all nu)", ok, detail)


def test_c1b_regret_monotone_in_nu(default_sweep, verdict):
    name, ok, detail = _shape(default_sweep, "non-decreasing")
    assert verdict("criterion 1b (mean regret at t=1000 non-decreasing in nu)", ok, detail)


def test_c1c_regret_decreases_after_t200(default_sweep, verdict):
    name, ok, detail = _shape(default_sweep, "below t=200")
    assert verdict("criterion 1c (mean regret at t=1000 < t=200, all nu)", ok, detail)


# -- 2: incremental posterior against one-shot conditioning ----------------


def one_shot(K, idx, y, rho2):
    A = K[np.ix_(idx, idx)] + rho2 * np.eye(len(idx))
    Kx = K[idx, :]
    mu = Kx.T @ np.linalg.solve(A, y)
    var = np.diag(K) - np.einsum("ij,ij->j", Kx, np.linalg.solve(A, Kx))
    return mu, np.sqrt(np.maximum(var, 0.0))


def test_c2_gp_exactness(verdict):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        m = int(rng.integers(2, 22))
        grid = Grid(np.sort(rng.choice(np.linspace(0, 1, 101), size=m, replace=False)))
        rho2 = float(10 ** rng.uniform(-3, 0))
        s = GpState(KernelSpec(delta=float(rng.uniform())), grid, rho2)
        n = int(rng.integers(1, 51))
        idx = rng.integers(0, m, size=n)
        y = rng.normal(size=n)
        for x, v in zip(idx, y):
            s.update(Observation(int(x), float(v)))
        mu, sd = one_shot(s.K, idx, y, rho2)
        worst = max(worst, np.abs(s.posterior_mean - mu).max(), np.abs(s.posterior_sigma - sd).max())
    assert verdict("criterion 2 (incremental GP posterior == one-shot, tol 1e-8)", worst <= 1e-8,
                   f"max abs deviation {worst:.3g}")


# -- 3: sample-count table ------------------------------------------------


def test_c3_sample_complexity_table(verdict):
    got = (sample_count_theorem2(0.1, 0.05), sample_count_corollary1(0.1, 0.05), sample_count_redraw(0.1, 0.05, 10))
    assert verdict("criterion 3 (sample counts 29/30/300)", got == (29, 30, 300), f"got {got}")


# -- 4: violation probability of the sampled maximum ----------------------


def test_c4_violation_probability(verdict):
    rep = violation_suite(0.1, 0.05, outer=2000, inner=5000, seed=0, n=30)
    assert verdict("criterion 4 (violation frequency <= zeta + 3 SE)", rep.passed, rep.line())


# -- 5, 6: per-run concentration and bound validity ------------------------


@pytest.fixture(scope="module")
def population():
    cfg = small_config(T=200, epsilon=0.1, repetitions=200, seed=0)
    return cfg, run_population(cfg)


def test_c5_concentration(population, verdict):
    cfg, pop = population
    rep = concentration_suite(cfg, pop)
    assert verdict("criterion 5 (UCB-width exceedance frequency <= eps + 3 SE)", rep.passed, rep.line())


def test_c6_bound_validity(population, verdict):
    cfg, pop = population
    rep = bound_suite(cfg, pop)
    assert verdict("criterion 6 (regret above bound frequency <= eps + 3 SE, all t <= 200)", rep.passed, rep.line())


# -- 7: robustness of J under re-draws ------------------------------------


def test_c7_redraw_robustness(verdict):
    rep = robustness_suite(0.1, 0.05, RedrawSchedule(100, nu=0.4), Grid.arange(0.0, 1.0, 0.1),
                           outer=500, inner=1000, seed=0)
    assert verdict("criterion 7 (outer frequency of P(alter J) <= eta is >= 1 - zeta - 3 SE)", rep.passed,
                   rep.line())


# -- 8: incumbent against brute force -------------------------------------


def test_c8_oracle_equivalence(verdict):
    cfg = small_config(T=500, rho2=1e-10, repetitions=100, seed=0)
    rep = oracle_suite(cfg, tol=1e-3, required=0.95)
    assert verdict("criterion 8 (incumbent matches J within 1e-3 in >= 95% of seeds)", rep.passed, rep.line())


# -- 9: epigraph monotonicity and non-binding equality ---------------------


def test_c9_appendix_properties(verdict):
    rng = np.random.default_rng(9)
    mono_fail = nonbinding_fail = nonbinding_checked = 0
    for _ in range(10_000):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 8))
        # integer-valued tables make ties and exact equalities common
        F = rng.integers(-5, 6, size=(n, m)).astype(float) if rng.random() < 0.5 else rng.normal(size=(n, m))
        d = rng.integers(-5, 6, size=m).astype(float) if rng.random() < 0.5 else rng.normal(size=m)
        base = solve_scenario(F)
        extended = solve_scenario(np.vstack([F, d]))
        mono_fail += extended.tau_star > base.tau_star
        if d[base.x_star_index] >= base.tau_star:
            nonbinding_checked += 1
            nonbinding_fail += extended.tau_star != base.tau_star
    ok = mono_fail == 0 and nonbinding_fail == 0 and nonbinding_checked > 0
    assert verdict("criterion 9 (monotone value and non-binding equality on 1e4 instances)", ok,
                   f"monotonicity failures {mono_fail}, non-binding failures {nonbinding_fail} "
                   f"of {nonbinding_checked} non-binding cases")


# -- 10: determinism --------------------------------------------------------


def _write_outputs(cfg, out):
    res = simulate(cfg, cfg.seed)
    curve = next(iter(res.curves.values()))
    write_csv(out / "trace.csv", TRACE_HEADER, trace_rows(res.trace, curve))
    write_csv(out / "curve.csv", CURVE_HEADER, curve_rows(curve))
    return [(out / f).read_bytes() for f in ("trace.csv", "curve.csv")]


def test_c10_determinism(tmp_path, verdict):
    cfg = ExperimentConfig()
    cfg.seed = 17
    cfg.validate()
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    a = _write_outputs(cfg, tmp_path / "a")
    b = _write_outputs(cfg, tmp_path / "b")
    assert verdict("criterion 10 (identical seeds give byte-identical CSVs)", a == b,
                   f"{sum(len(x) for x in a)} bytes compared")
