"""GP-UCB and Scenario-UCB decision loops."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .env import Blackbox, GroundTruth
from .errors import ContractViolation, NumericalError
from .gp import GpState, Observation
from .scenario import ScenarioSet

BETA_DENOMINATOR = {"gp_ucb": 6.0, "scenario_ucb": 3.0}


@dataclass(frozen=True)
class BetaSchedule:
    """``beta_t = 2 log(|X| pi^2 t^2 / (c * epsilon))`` with ``c = 6`` (GP-UCB) or ``3`` (Scenario-UCB)."""

    variant: str
    grid_size: int
    epsilon: float = 0.1

    def __post_init__(self):
        if self.variant not in BETA_DENOMINATOR:
            raise ContractViolation(f"unknown beta variant {self.variant!r}")
        if self.grid_size < 1:
            raise ContractViolation("grid size must be >= 1")
        if not 0 < self.epsilon < 1:
            raise ContractViolation(f"epsilon must lie in (0, 1), got {self.epsilon}")

    def __call__(self, t: int) -> float:
        return beta(self, t)


def beta(schedule: BetaSchedule, t: int) -> float:
    if t < 1:
        raise ContractViolation(f"beta_t needs t >= 1, got {t}")
    c = BETA_DENOMINATOR[schedule.variant]
    return 2.0 * math.log(schedule.grid_size * math.pi**2 * t * t / (c * schedule.epsilon))


@dataclass(frozen=True)
class Decision:
    t: int
    x_index: int
    scenario_index: int | None
    ucb_value: float
    y: float


@dataclass
class RunTrace:
    """Per-iteration record of a run.

    ``sigmas[t-1]`` is the posterior sigma of the selected scenario at the
    selected point *before* the step's update.
    """

    decisions: list[Decision] = field(default_factory=list)
    sigmas: list[float] = field(default_factory=list)
    betas: list[float] = field(default_factory=list)
    seeds: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    n_scenarios: int = 1

    def __len__(self) -> int:
        return len(self.decisions)

    @property
    def x_indices(self) -> np.ndarray:
        return np.array([d.x_index for d in self.decisions], dtype=int)

    @property
    def scenario_indices(self) -> np.ndarray:
        return np.array([0 if d.scenario_index is None else d.scenario_index for d in self.decisions], dtype=int)

    @property
    def ys(self) -> np.ndarray:
        return np.array([d.y for d in self.decisions])


def select_scenario_ucb(states, beta_t: float) -> tuple[int, int, float]:
    """Max over the grid of the min over scenarios of ``mu + sqrt(beta) sigma``.

    Ties go to the lowest grid index and then the lowest scenario index.

    Returns:
        ``(x_index, scenario_index, ucb)``.
    """
    if len(states) == 0:
        raise ContractViolation("need at least one GP state")
    if beta_t < 0:
        raise ContractViolation(f"beta must be non-negative, got {beta_t}")
    table = np.stack([s.ucb(beta_t) for s in states], axis=1)  # (|X|, N)
    return select_from_table(table)


def select_from_table(table: np.ndarray) -> tuple[int, int, float]:
    """Max-min selection on an explicit ``(|X|, N)`` UCB table."""
    table = np.asarray(table, dtype=float)
    row_min = table.min(axis=1)
    x = int(np.argmax(row_min))  # argmax/argmin return the first hit
    i = int(np.argmin(table[x]))
    return x, i, float(table[x, i])


class ScenarioUCB:
    """Stateful Scenario-UCB loop; one :meth:`step` is one iteration.

    Only the GP of the selected scenario is updated per step.
    """

    def __init__(self, env: Blackbox | GroundTruth, schedule: BetaSchedule):
        self.env = env.blackbox() if isinstance(env, GroundTruth) else env
        if len(self.env.grid) != schedule.grid_size:
            raise ContractViolation("beta schedule grid size does not match the environment")
        self.schedule = schedule
        self.states = [GpState(k, self.env.grid, self.env.noise_var) for k in self.env.kernels]
        self.t = 0
        self.trace = RunTrace(n_scenarios=len(self.states))

    def step(self) -> Decision:
        t = self.t + 1
        beta_t = beta(self.schedule, t)
        x, i, ucb = select_scenario_ucb(self.states, beta_t)
        sigma = float(self.states[i].posterior_sigma[x])
        y = self.env.query(x, i)
        try:
            self.states[i].update(Observation(x, y, t))
        except NumericalError as exc:
            raise NumericalError(str(exc), condition=exc.condition, iteration=t) from exc
        decision = Decision(t, x, i, ucb, y)
        self.trace.decisions.append(decision)
        self.trace.sigmas.append(sigma)
        self.trace.betas.append(beta_t)
        self.t = t
        return decision

    def run(self, T: int) -> RunTrace:
        for _ in range(T):
            self.step()
        return self.trace

    def incumbent(self) -> tuple[int, float]:
        """``argmax_x min_i mu^i(x)`` and its value under the current posteriors."""
        means = np.stack([s.posterior_mean for s in self.states], axis=1)
        row_min = means.min(axis=1)
        x = int(np.argmax(row_min))
        return x, float(row_min[x])


def run_scenario_ucb(gt: GroundTruth, scenario_set: ScenarioSet | None, T: int, schedule: BetaSchedule,
                     *, seeds: dict | None = None, config: dict | None = None) -> RunTrace:
    """Run Scenario-UCB for ``T`` iterations against ``gt``.

    ``scenario_set`` must be the set ``gt`` was built from (or ``None``); the
    algorithm reads only its uncertainty parameters.
    """
    if T < 1:
        raise ContractViolation("T must be >= 1")
    if scenario_set is not None and scenario_set is not gt.scenarios:
        if not np.array_equal(scenario_set.deltas, gt.scenarios.deltas):
            raise ContractViolation("scenario set does not match the ground truth")
    loop = ScenarioUCB(gt.blackbox(), schedule)
    trace = loop.run(T)
    trace.seeds = dict(seeds or {})
    trace.config = dict(config or {})
    return trace


class _SingleScenario:
    """Blackbox restricted to one scenario, presented as scenario 0."""

    def __init__(self, bb: Blackbox, scenario_id: int):
        if not 0 <= scenario_id < bb.n_scenarios:
            raise ContractViolation(f"scenario id {scenario_id} out of range")
        self._bb = bb
        self._id = scenario_id
        self.grid = bb.grid
        self.noise_var = bb.noise_var
        self.deltas = (bb.deltas[scenario_id],)
        self.kernels = (bb.kernels[scenario_id],)

    def query(self, x_index: int, scenario_id: int) -> float:
        return self._bb.query(x_index, self._id)


def run_gp_ucb(gt: GroundTruth, scenario_id: int, T: int, schedule: BetaSchedule,
               *, seeds: dict | None = None, config: dict | None = None) -> RunTrace:
    """Plain GP-UCB on a single fixed scenario (decisions carry no scenario index)."""
    if T < 1:
        raise ContractViolation("T must be >= 1")
    loop = ScenarioUCB(_SingleScenario(gt.blackbox(), scenario_id), schedule)
    loop.run(T)
    trace = loop.trace
    trace.decisions = [Decision(d.t, d.x_index, None, d.ucb_value, d.y) for d in trace.decisions]
    trace.seeds = dict(seeds or {})
    trace.config = {"scenario_id": scenario_id, **(config or {})}
    return trace
