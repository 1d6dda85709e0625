"""Scenario max-min value, regret under re-draw, information gain and bound curves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algo import RunTrace
from .env import GroundTruth
from .errors import ContractViolation
from .kernel import KernelSpectrum
from .scenario import Scenario


@dataclass(frozen=True)
class ScenarioSolution:
    """Solution of ``max tau  s.t.  F(x, d_i) >= tau  for all i``."""

    x_star_index: int
    i_star_index: int
    tau_star: float


def solve_scenario(truths, grid=None) -> ScenarioSolution:
    """Exhaustive max-min over an ``(N, |X|)`` table of function values.

    Ties: lowest grid index first, then lowest scenario index.
    """
    F = np.asarray(truths, dtype=float)
    if F.ndim == 1:
        F = F[None, :]
    if F.size == 0:
        raise ContractViolation("solve_scenario needs a non-empty table")
    if grid is not None and F.shape[1] != len(grid):
        raise ContractViolation("truth tables do not cover the grid")
    col_min = F.min(axis=0)
    x = int(np.argmax(col_min))
    i = int(np.argmin(F[:, x]))
    return ScenarioSolution(x, i, float(F[i, x]))


@dataclass(frozen=True, eq=False)
class RegretCurve:
    """Per-step regret quantities for ``t = 1..T`` (index ``t-1``).

    Attributes:
        r_inst: ``J(D_N) - F(x_t, d_{i_t})``.
        j_redraw: ``J(D_N + d^t_{N+1})`` with the active extra scenario.
        r_redraw_avg: running mean of ``j_redraw - F(x_t, d_{i_t})``.
        r_nodraw_avg: running mean of ``r_inst``.
        gamma: empirical information gain summed over scenarios up to ``t``.
        bound: ``sqrt(8 beta_t gamma_t / (t log(1 + 1/rho^2)))``.
    """

    r_inst: np.ndarray
    j_redraw: np.ndarray
    r_redraw_avg: np.ndarray
    r_nodraw_avg: np.ndarray
    gamma: np.ndarray
    bound: np.ndarray
    j_base: float
    redraw_count: np.ndarray

    def __len__(self) -> int:
        return self.r_inst.shape[0]


def _played_values(trace: RunTrace, table: np.ndarray) -> np.ndarray:
    x = trace.x_indices
    i = trace.scenario_indices
    if i.size and i.max() >= table.shape[0]:
        raise ContractViolation("trace refers to a scenario outside the truth table")
    return table[i, x]


def expand_redraws(redraw_draws: Sequence[tuple[int, Scenario]], T: int) -> np.ndarray:
    """Index into ``redraw_draws`` of the extra scenario active at each ``t``."""
    times = [int(t) for t, _ in redraw_draws]
    if not times or times[0] != 1:
        raise ContractViolation("the first extra scenario must be drawn at t = 1")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ContractViolation("re-draw times must be strictly increasing")
    if times[-1] > T:
        raise ContractViolation("re-draw time beyond the trace horizon")
    active = np.zeros(T, dtype=int)
    for k, t in enumerate(times):
        active[t - 1:] = k
    return active


def redraw_regret(trace: RunTrace, gt: GroundTruth, redraw_draws=None) -> RegretCurve:
    """Regret under re-draw of a run, evaluated on the noiseless truth.

    Args:
        trace: output of a Scenario-UCB run on ``gt``.
        gt: ground truth the run was played against.
        redraw_draws: ``[(t, Scenario), ...]`` extra scenarios and their draw
            times, or ``None`` to evaluate against ``J(D_N)`` alone.
    """
    T = len(trace)
    if T < 1:
        raise ContractViolation("empty trace")
    if len(trace.sigmas) != T or len(trace.betas) != T:
        raise ContractViolation("trace arrays have mismatched lengths")
    table = gt.truth_table()
    if table.shape[0] != trace.n_scenarios:
        raise ContractViolation("trace and ground truth disagree on the number of scenarios")
    played = _played_values(trace, table)
    base = solve_scenario(table)
    t_axis = np.arange(1, T + 1)

    if redraw_draws is None:
        j_redraw = np.full(T, base.tau_star)
        count = np.zeros(T, dtype=int)
    else:
        active = expand_redraws(redraw_draws, T)
        j_per_draw = []
        for _, sc in redraw_draws:
            real = np.asarray(sc.realization, dtype=float)
            if real.shape != (table.shape[1],):
                raise ContractViolation("extra scenario realization does not cover the grid")
            j_per_draw.append(solve_scenario(np.vstack([table, real])).tau_star)
        j_redraw = np.asarray(j_per_draw)[active]
        count = active + 1

    r_inst = base.tau_star - played
    gamma = empirical_gamma(trace, gt.noise_var)
    betas = np.asarray(trace.betas)
    bound = np.sqrt(8.0 * betas * gamma.prefix_total / (t_axis * math.log1p(1.0 / gt.noise_var)))
    return RegretCurve(
        r_inst=r_inst,
        j_redraw=j_redraw,
        r_redraw_avg=np.cumsum(j_redraw - played) / t_axis,
        r_nodraw_avg=np.cumsum(r_inst) / t_axis,
        gamma=gamma.prefix_total,
        bound=bound,
        j_base=base.tau_star,
        redraw_count=count,
    )


@dataclass(frozen=True, eq=False)
class GammaEstimate:
    """Empirical information gain of a run.

    Attributes:
        per_scenario: ``gamma^i_T`` for each scenario at the final step.
        prefix: ``(T, N)`` array, row ``t-1`` holds ``gamma^i_t``.
        bound_tstar1, bound_tstarX: eigenvalue shape functions per scenario
            (only when spectra were supplied).
    """

    per_scenario: np.ndarray
    prefix: np.ndarray
    bound_tstar1: np.ndarray | None = None
    bound_tstarX: np.ndarray | None = None

    @property
    def total(self) -> float:
        return float(self.per_scenario.sum())

    @property
    def prefix_total(self) -> np.ndarray:
        return self.prefix.sum(axis=1)


def empirical_gamma(trace: RunTrace, rho2: float, spectra: Sequence[KernelSpectrum] | None = None) -> GammaEstimate:
    """``gamma^i_T = 1/2 sum_{t: i_t = i} log(1 + sigma^i_{t-1}(x_t)^2 / rho^2)``."""
    if rho2 <= 0:
        raise ContractViolation("rho^2 must be positive")
    N = trace.n_scenarios
    T = len(trace)
    gains = np.zeros((T, N))
    if T:
        sig = np.asarray(trace.sigmas, dtype=float)
        gains[np.arange(T), trace.scenario_indices] = 0.5 * np.log1p(sig**2 / rho2)
    prefix = np.cumsum(gains, axis=0) if T else np.zeros((0, N))
    final = prefix[-1] if T else np.zeros(N)
    b1 = bX = None
    if spectra is not None and T:
        if len(spectra) != N:
            raise ContractViolation("need one spectrum per scenario")
        b1 = np.array([gamma_bound(s, T, rho2, 1) for s in spectra])
        bX = np.array([gamma_bound(s, T, rho2, len(s)) for s in spectra])
    return GammaEstimate(final, prefix, b1, bX)


def gamma_bound(spec: KernelSpectrum, T: int, rho2: float, t_star: int) -> float:
    """Unit-constant shape ``rho^-2 (T sum_{j>t*} lam_j + t* log(T sum_j lam_j))``.

    An order-level curve, not a certified bound.
    """
    lam = np.asarray(spec.eigenvalues, dtype=float)
    if not 1 <= t_star <= lam.size:
        raise ContractViolation(f"t_star must lie in [1, {lam.size}], got {t_star}")
    if T < 1:
        raise ContractViolation("T must be >= 1")
    if rho2 <= 0:
        raise ContractViolation("rho^2 must be positive")
    tail = float(lam[t_star:].sum())
    return (T * tail + t_star * math.log(T * float(lam.sum()))) / rho2


def regret_bound(beta_T: float, gamma_T: float, T: int, rho2: float) -> float:
    """``sqrt(8 beta_T gamma_T / (T log(1 + 1/rho^2)))``."""
    if not (beta_T > 0 and gamma_T > 0 and T > 0 and rho2 > 0):
        raise ContractViolation("regret_bound needs positive arguments")
    return math.sqrt(8.0 * beta_T * gamma_T / (T * math.log1p(1.0 / rho2)))


def consistency_scaling(T: int, nu: float, grid_size: int, eta: float, zeta: float, epsilon: float) -> float:
    """Unit-constant regret scaling for ``alpha(T) = T**nu`` and the matching sample count.

    ``sqrt(alpha(T) |X| / (eta T) log(1/zeta) log(|X| T^2 / epsilon) log(|X| T))``
    """
    if T < 1 or grid_size < 1:
        raise ContractViolation("T and grid size must be >= 1")
    if not 0 <= nu <= 1:
        raise ContractViolation("nu must lie in [0, 1]")
    for name, v in (("eta", eta), ("zeta", zeta), ("epsilon", epsilon)):
        if not 0 < v < 1:
            raise ContractViolation(f"{name} must lie in (0, 1)")
    alpha = float(T) ** nu
    return math.sqrt(
        alpha * grid_size / (eta * T)
        * math.log(1.0 / zeta)
        * math.log(grid_size * T * T / epsilon)
        * math.log(grid_size * T)
    )


def consistency_guaranteed(nu: float) -> bool:
    """Sub-linear re-draw frequency (``nu < 1``) suffices for vanishing regret."""
    return nu < 1.0
