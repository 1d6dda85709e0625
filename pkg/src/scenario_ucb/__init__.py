"""Scenario-based robust blackbox optimization with Gaussian-process UCB."""

__version__ = "0.1.0"

from .algo import BetaSchedule, RunTrace, ScenarioUCB, beta, run_gp_ucb, run_scenario_ucb, select_scenario_ucb
from .env import GroundTruth, synthesize
from .gp import GpState, Observation, gp_predict, gp_ucb_value, gp_update
from .kernel import Grid, KernelSpec, kernel_eval, kernel_matrix, spectrum
from .regret import (
    consistency_scaling,
    empirical_gamma,
    gamma_bound,
    redraw_regret,
    regret_bound,
    solve_scenario,
)
from .scenario import (
    DeltaDistribution,
    RedrawSchedule,
    SeedBundle,
    draw_redraws,
    draw_scenarios,
    redraw_times,
    sample_count_corollary1,
    sample_count_redraw,
    sample_count_theorem2,
)

__all__ = [
    "BetaSchedule", "DeltaDistribution", "GpState", "Grid", "GroundTruth", "KernelSpec", "Observation",
    "RedrawSchedule", "RunTrace", "ScenarioUCB", "SeedBundle", "beta", "consistency_scaling",
    "draw_redraws", "draw_scenarios", "empirical_gamma", "gamma_bound", "gp_predict", "gp_ucb_value",
    "gp_update", "kernel_eval", "kernel_matrix", "redraw_regret", "redraw_times", "regret_bound",
    "run_gp_ucb", "run_scenario_ucb", "sample_count_corollary1", "sample_count_redraw",
    "sample_count_theorem2", "select_scenario_ucb", "solve_scenario", "spectrum", "synthesize",
]
