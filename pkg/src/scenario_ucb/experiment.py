"""Single runs and nu-sweeps driven by an :class:`ExperimentConfig`."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .algo import BetaSchedule, RunTrace, run_scenario_ucb
from .config import ExperimentConfig
from .env import GroundTruth
from .regret import RegretCurve, redraw_regret
from .scenario import SeedBundle, draw_redraws, draw_scenarios, redraw_times


@dataclass
class RunResult:
    seed: int
    trace: RunTrace
    curves: dict  # nu (or "table") -> RegretCurve
    n_scenarios: int


def rep_seed(config: ExperimentConfig, rep: int) -> int:
    return int(config.seed) + int(rep)


def build_environment(config: ExperimentConfig, seed: int, n: int):
    bundle = SeedBundle(seed)
    grid = config.grid()
    scenarios = draw_scenarios(n, bundle, config.delta_distribution(), grid, config.kernel_spec())
    gt = GroundTruth(grid, scenarios, config.rho2, bundle.rng("noise"))
    return bundle, gt


def simulate(config: ExperimentConfig, seed: int, nus=None) -> RunResult:
    """Play one Scenario-UCB run and score it for every requested re-draw schedule.

    The run itself does not depend on the schedule, so one trace serves all
    ``nus`` whenever they share a scenario count.
    """
    keys = list(nus) if nus is not None else [None]
    n = config.scenario_count(keys[0])
    if any(config.scenario_count(k) != n for k in keys):
        raise ValueError("all schedules of one simulate() call must share N")
    bundle, gt = build_environment(config, seed, n)
    schedule = BetaSchedule("scenario_ucb", len(gt.grid), config.epsilon)
    trace = run_scenario_ucb(gt, gt.scenarios, config.T, schedule, seeds=bundle.as_dict(), config={"N": n})
    if gt.n_truth_reads:
        raise AssertionError("the algorithm read noiseless truth values")
    curves = {}
    for key in keys:
        sched = config.schedule(key)
        draws = draw_redraws(redraw_times(sched), bundle, config.delta_distribution(), gt.grid, config.kernel_spec())
        curves[key if key is not None else config.nu] = redraw_regret(trace, gt, draws)
    return RunResult(seed, trace, curves, n)


def _simulate_job(args):
    config, seed, nus = args
    res = simulate(config, seed, nus)
    # traces are large and unused by sweep aggregation
    return RunResult(res.seed, RunTrace(n_scenarios=res.n_scenarios), res.curves, res.n_scenarios)


def map_jobs(func, jobs: list, n_workers: int):
    if n_workers <= 1 or len(jobs) <= 1:
        return [func(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(func, jobs))


@dataclass
class SweepSummary:
    nus: list
    t: np.ndarray
    mean: dict  # nu -> mean r_redraw_avg over repetitions, shape (T,)
    sem: dict
    per_rep: dict  # nu -> (reps, T)
    mean_nodraw: dict
    mean_bound: dict


def sweep(config: ExperimentConfig, nus=None) -> SweepSummary:
    nus = list(config.nus() if nus is None else nus)
    groups: dict[int, list[float]] = {}
    for nu in nus:
        groups.setdefault(config.scenario_count(nu), []).append(nu)
    jobs = [(config, rep_seed(config, r), g) for g in groups.values() for r in range(config.repetitions)]
    results = map_jobs(_simulate_job, jobs, config.jobs)
    per_rep = {nu: [] for nu in nus}
    nodraw = {nu: [] for nu in nus}
    bound = {nu: [] for nu in nus}
    for res in results:
        for nu, curve in res.curves.items():
            per_rep[nu].append(curve.r_redraw_avg)
            nodraw[nu].append(curve.r_nodraw_avg)
            bound[nu].append(curve.bound)
    t = np.arange(1, config.T + 1)
    arr = {nu: np.vstack(v) for nu, v in per_rep.items()}
    reps = config.repetitions
    return SweepSummary(
        nus=nus,
        t=t,
        mean={nu: a.mean(axis=0) for nu, a in arr.items()},
        sem={nu: (a.std(axis=0, ddof=1) / np.sqrt(reps) if reps > 1 else np.zeros(a.shape[1])) for nu, a in arr.items()},
        per_rep=arr,
        mean_nodraw={nu: np.vstack(v).mean(axis=0) for nu, v in nodraw.items()},
        mean_bound={nu: np.vstack(v).mean(axis=0) for nu, v in bound.items()},
    )


def shape_checks(summary: SweepSummary, early_t: int = 100, mid_t: int = 200, final_t: int | None = None) -> list[tuple[str, bool, str]]:
    """Qualitative regret-curve checks on a sweep; ``(name, passed, detail)`` triples."""
    T = summary.t[-1]
    final_t = T if final_t is None else final_t
    nus = sorted(summary.nus)
    out = []
    if early_t <= T:
        vals = {nu: summary.mean[nu][early_t - 1] for nu in nus}
        out.append((
            f"mean regret below 0.5 by t={early_t}",
            all(v < 0.5 for v in vals.values()),
            ", ".join(f"nu={nu:g}: {v:.4f}" for nu, v in vals.items()),
        ))
    finals = [summary.mean[nu][final_t - 1] for nu in nus]
    out.append((
        f"mean regret at t={final_t} non-decreasing in nu",
        all(b >= a for a, b in zip(finals, finals[1:])),
        ", ".join(f"nu={nu:g}: {v:.4f}" for nu, v in zip(nus, finals)),
    ))
    if mid_t < final_t:
        pairs = {nu: (summary.mean[nu][mid_t - 1], summary.mean[nu][final_t - 1]) for nu in nus}
        out.append((
            f"mean regret at t={final_t} below t={mid_t}",
            all(b < a for a, b in pairs.values()),
            ", ".join(f"nu={nu:g}: {a:.4f} -> {b:.4f}" for nu, (a, b) in pairs.items()),
        ))
    return out


def curve_for(result: RunResult) -> RegretCurve:
    return next(iter(result.curves.values()))
