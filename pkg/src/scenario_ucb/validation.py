"""Monte-Carlo checks of the probabilistic guarantees.

Every suite reports an observed frequency, the threshold it is compared to
and the standard error used for the ``3 * SE`` allowance. Standard errors are
evaluated at the nominal probability (``epsilon``, ``zeta``), so the
allowance does not depend on the outcome being tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algo import BetaSchedule, ScenarioUCB
from .config import ExperimentConfig
from .env import synthesize_batch
from .errors import ConfigError
from .experiment import build_environment, map_jobs, rep_seed
from .kernel import Grid
from .regret import redraw_regret, solve_scenario
from .scenario import (
    DeltaDistribution,
    RedrawSchedule,
    SeedBundle,
    redraw_times,
    sample_count_corollary1,
    sample_count_redraw,
)

SUITES = ("concentration", "violation", "bound", "robustness")


@dataclass
class SuiteReport:
    suite: str
    observed: float
    threshold: float
    se: float
    n: int
    passed: bool
    direction: str = "<="
    details: dict = field(default_factory=dict)

    @property
    def limit(self) -> float:
        return self.threshold + 3 * self.se if self.direction == "<=" else self.threshold - 3 * self.se

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.suite}: observed={self.observed:.6g} {self.direction} "
                f"threshold={self.threshold:.6g} {'+' if self.direction == '<=' else '-'} 3*SE "
                f"(SE={self.se:.4g}, limit={self.limit:.6g}, n={self.n})")

    def to_text(self) -> str:
        lines = [self.line(), f"suite = {self.suite}", f"observed = {self.observed!r}",
                 f"threshold = {self.threshold!r}", f"se = {self.se!r}", f"limit = {self.limit!r}",
                 f"n = {self.n}", f"passed = {int(self.passed)}"]
        lines += [f"{k} = {v}" for k, v in sorted(self.details.items())]
        return "\n".join(lines) + "\n"


def nominal_se(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def min_repetitions(p: float) -> int:
    """Smallest ``n`` with ``3 * SE(p, n) <= p``, i.e. a 3-sigma allowance no wider than the threshold."""
    return math.ceil(9 * (1 - p) / p)


def check_power(suite: str, p: float, n: int) -> None:
    need = min_repetitions(p)
    if n < need:
        raise ConfigError(f"suite {suite!r} is underpowered: {n} repetitions, need at least {need} "
                          f"for 3-sigma resolution at p={p:g}")


# -- per-run population shared by the concentration and bound suites -------


def _population_job(args):
    config, seed = args
    n = config.scenario_count()
    bundle, gt = build_environment(config, seed, n)
    loop = ScenarioUCB(gt.blackbox(), BetaSchedule("scenario_ucb", len(gt.grid), config.epsilon))
    trace = loop.run(config.T)
    curve = redraw_regret(trace, gt, None)
    sig = np.asarray(trace.sigmas)
    betas = np.asarray(trace.betas)
    conc = bool(np.any(curve.r_inst > 2 * np.sqrt(betas) * sig))
    bound = bool(np.any(curve.r_nodraw_avg > curve.bound))
    return conc, bound, float(np.max(curve.r_nodraw_avg - curve.bound))


def run_population(config: ExperimentConfig) -> list[tuple[bool, bool, float]]:
    jobs = [(config, rep_seed(config, r)) for r in range(config.repetitions)]
    return map_jobs(_population_job, jobs, config.jobs)


def concentration_suite(config: ExperimentConfig, population=None) -> SuiteReport:
    """Fraction of runs in which ``r_t > 2 sqrt(beta_t) sigma_{t-1}(x_t)`` at some step."""
    pop = run_population(config) if population is None else population
    n = len(pop)
    freq = sum(p[0] for p in pop) / n
    se = nominal_se(config.epsilon, n)
    return SuiteReport("concentration", freq, config.epsilon, se, n, freq <= config.epsilon + 3 * se,
                       details={"T": config.T, "N": config.scenario_count(), "grid_size": len(config.grid())})


def bound_suite(config: ExperimentConfig, population=None) -> SuiteReport:
    """Fraction of runs whose no-re-draw regret exceeds the empirical-gamma bound at some ``t <= T``."""
    pop = run_population(config) if population is None else population
    n = len(pop)
    freq = sum(p[1] for p in pop) / n
    se = nominal_se(config.epsilon, n)
    worst = max(p[2] for p in pop)
    return SuiteReport("bound", freq, config.epsilon, se, n, freq <= config.epsilon + 3 * se,
                       details={"T": config.T, "max_regret_minus_bound": f"{worst:.6g}"})


# -- violation probability of a sampled maximum -----------------------------


def violation_suite(eta: float, zeta: float, outer: int, inner: int, seed: int = 0,
                    delta_dist: DeltaDistribution | None = None, n: int | None = None) -> SuiteReport:
    """Monte-Carlo check of the sampled-maximum violation guarantee.

    ``G(x_hat, d) = -F(x_hat, d)`` at a single fixed point, with ``d`` drawn
    like a scenario. Each outer draw takes ``n`` scenarios (default: the
    ``ceil(log(1/zeta)/eta)`` count), forms ``M = max_j G``, and estimates the
    violation probability ``P(G > M)`` from ``inner`` fresh draws.
    """
    n = sample_count_corollary1(eta, zeta) if n is None else n
    delta_dist = delta_dist or DeltaDistribution()
    point = Grid([0.0])
    rng = SeedBundle(seed).rng("scenarios")
    violated = 0
    p_hat = np.empty(outer)
    for k in range(outer):
        g_multi = -synthesize_batch(delta_dist.sample(rng, n), point, rng)[:, 0]
        g_fresh = -synthesize_batch(delta_dist.sample(rng, inner), point, rng)[:, 0]
        p_hat[k] = np.mean(g_fresh > g_multi.max())
        violated += p_hat[k] > eta
    freq = violated / outer
    se = nominal_se(zeta, outer)
    return SuiteReport("violation", freq, zeta, se, outer, freq <= zeta + 3 * se,
                       details={"N": n, "eta": eta, "inner": inner, "mean_violation_probability": f"{p_hat.mean():.6g}"})


# -- robustness of J under re-draw ------------------------------------------


def robustness_suite(eta: float, zeta: float, schedule: RedrawSchedule, grid: Grid, outer: int, inner: int,
                     seed: int = 0, delta_dist: DeltaDistribution | None = None, kernel=None) -> SuiteReport:
    """Frequency over outer multisamples with ``P(some re-draw alters J) <= eta``.

    ``N`` follows the re-draw sample count for ``alpha(T)``. For each outer
    draw of ``D_N``, ``inner`` independent re-draw sequences (one fresh
    scenario per re-draw time) are checked for any change of the max-min value.
    """
    delta_dist = delta_dist or DeltaDistribution()
    alpha_T = schedule.alpha(schedule.T_max)
    N = sample_count_redraw(eta, zeta, alpha_T)
    k = len(redraw_times(schedule))
    rng = SeedBundle(seed).rng("redraw")
    good = 0
    p_hat = np.empty(outer)
    for o in range(outer):
        table = synthesize_batch(delta_dist.sample(rng, N), grid, rng, kernel)
        J = solve_scenario(table).tau_star
        col_min = table.min(axis=0)
        fresh = synthesize_batch(delta_dist.sample(rng, inner * k), grid, rng, kernel)
        # J(D_N + d) for each fresh d, computed on the running column minimum
        j_new = np.minimum(col_min[None, :], fresh).max(axis=1)
        altered = (j_new != J).reshape(inner, k).any(axis=1)
        p_hat[o] = altered.mean()
        good += p_hat[o] <= eta
    freq = good / outer
    se = nominal_se(zeta, outer)
    return SuiteReport("robustness", freq, 1 - zeta, se, outer, freq >= 1 - zeta - 3 * se, direction=">=",
                       details={"N": N, "alpha_T": f"{alpha_T:.6g}", "redraws": k, "inner": inner,
                                "mean_alter_probability": f"{p_hat.mean():.6g}"})


# -- oracle equivalence of the incumbent ------------------------------------


def _oracle_job(args):
    config, seed = args
    bundle, gt = build_environment(config, seed, config.scenario_count())
    loop = ScenarioUCB(gt.blackbox(), BetaSchedule("scenario_ucb", len(gt.grid), config.epsilon))
    loop.run(config.T)
    _, value = loop.incumbent()
    J = solve_scenario(gt.truth_table()).tau_star
    return abs(value - J)


def oracle_suite(config: ExperimentConfig, tol: float = 1e-3, required: float = 0.95) -> SuiteReport:
    """Share of seeds where the posterior max-min incumbent matches the exact ``J(D_N)``."""
    jobs = [(config, rep_seed(config, r)) for r in range(config.repetitions)]
    errs = np.array(map_jobs(_oracle_job, jobs, config.jobs))
    frac = float(np.mean(errs <= tol))
    return SuiteReport("oracle", frac, required, 0.0, len(errs), frac >= required, direction=">=",
                       details={"tol": tol, "median_abs_error": f"{np.median(errs):.6g}"})


def run_suite(suite: str, config: ExperimentConfig) -> SuiteReport:
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if suite == "concentration":
        check_power(suite, config.epsilon, config.repetitions)
        return concentration_suite(config)
    if suite == "bound":
        check_power(suite, config.epsilon, config.repetitions)
        return bound_suite(config)
    if suite == "violation":
        check_power(suite, config.zeta, config.outer_draws)
        return violation_suite(config.eta, config.zeta, config.outer_draws, config.inner_samples, config.seed,
                               config.delta_distribution())
    check_power(suite, config.zeta, config.outer_draws)
    return robustness_suite(config.eta, config.zeta, config.schedule(), config.grid(), config.outer_draws,
                            config.inner_samples, config.seed, config.delta_distribution(), config.kernel_spec())
