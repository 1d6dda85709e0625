"""Synthetic ground truth: one GP realization per scenario plus noisy queries."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from .errors import ContractViolation, NumericalError
from .kernel import Grid, KernelSpec, kernel_matrix

if TYPE_CHECKING:
    from .scenario import ScenarioSet

SAMPLING_JITTERS = (1e-10, 1e-8)


def psd_factor(K: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of ``K + jitter*I``, trying each jitter in turn."""
    eye = np.eye(K.shape[0])
    for jitter in SAMPLING_JITTERS:
        try:
            return np.linalg.cholesky(K + jitter * eye)
        except np.linalg.LinAlgError:
            continue
    raise NumericalError("kernel matrix could not be factorized for sampling", condition=np.linalg.cond(K))


def synthesize(delta: float, grid: Grid, seed, kernel: KernelSpec | None = None) -> np.ndarray:
    """Draw ``F(., d)`` over ``grid`` from ``N(0, K^delta)``.

    Args:
        delta: uncertainty parameter selecting the kernel.
        grid: decision domain.
        seed: anything accepted by :func:`numpy.random.default_rng`.
        kernel: template spec whose ``delta`` is replaced; defaults to the
            squared-exponential family with the affine lengthscale map.
    """
    spec = (kernel or KernelSpec()).with_delta(delta)
    L = psd_factor(kernel_matrix(spec, grid))
    z = np.random.default_rng(seed).standard_normal(len(grid))
    return L @ z


def synthesize_batch(deltas, grid: Grid, rng: np.random.Generator, kernel: KernelSpec | None = None,
                     chunk: int = 2048) -> np.ndarray:
    """One realization per entry of ``deltas``, shape ``(len(deltas), |X|)``.

    Batched counterpart of :func:`synthesize` for Monte-Carlo loops; it draws
    from ``rng`` directly instead of one seed per realization.
    """
    template = kernel or KernelSpec()
    deltas = np.atleast_1d(np.asarray(deltas, dtype=float))
    pts = grid.points
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    m = len(grid)
    idx = np.arange(m)
    eye = np.eye(m)
    out = np.empty((deltas.size, m))
    for lo in range(0, deltas.size, chunk):
        part = deltas[lo:lo + chunk]
        ells = np.array([template.with_delta(d).lengthscale for d in part])
        K = np.exp(-d2[None] / ells[:, None, None] ** 2)
        K[:, idx, idx] = 1.0
        for jitter in SAMPLING_JITTERS:
            try:
                L = np.linalg.cholesky(K + jitter * eye)
                break
            except np.linalg.LinAlgError:
                continue
        else:
            raise NumericalError("batched kernel matrices could not be factorized")
        z = rng.standard_normal((part.size, m))
        out[lo:lo + part.size] = np.einsum("bij,bj->bi", L, z)
    return out


class GroundTruth:
    """Materialized truth tables for a scenario set, with a private noise stream.

    Algorithms see the environment through :meth:`query` only (usually via
    :class:`Blackbox`); regret code reads :meth:`truth`. Both calls are counted
    so a harness can assert the separation.
    """

    def __init__(self, grid: Grid, scenarios: "ScenarioSet", noise_var: float, noise_rng=None):
        if noise_var < 0:
            raise ContractViolation("noise variance must be non-negative")
        self.grid = grid
        self.scenarios = scenarios
        self.noise_var = float(noise_var)
        self.rng = noise_rng if isinstance(noise_rng, np.random.Generator) else np.random.default_rng(noise_rng)
        for s in scenarios:
            if s.realization is None or len(s.realization) != len(grid):
                raise ContractViolation(f"scenario {s.id} has no realization over the grid")
        self._table = np.stack([np.asarray(s.realization, dtype=float) for s in scenarios])
        self._table.setflags(write=False)
        self.n_queries = 0
        self.n_truth_reads = 0

    def _check(self, x_index: int, scenario_id: int) -> tuple[int, int]:
        x = self.grid.check_index(x_index)
        if not 0 <= scenario_id < self._table.shape[0]:
            raise ContractViolation(f"scenario id {scenario_id} out of range")
        return x, int(scenario_id)

    def query(self, x_index: int, scenario_id: int) -> float:
        """Noisy evaluation ``F(x, d_i) + n`` with ``n ~ N(0, rho^2)``."""
        x, i = self._check(x_index, scenario_id)
        self.n_queries += 1
        noise = self.rng.normal(0.0, np.sqrt(self.noise_var)) if self.noise_var > 0 else 0.0
        return float(self._table[i, x] + noise)

    def truth(self, x_index: int, scenario_id: int) -> float:
        x, i = self._check(x_index, scenario_id)
        self.n_truth_reads += 1
        return float(self._table[i, x])

    def truth_table(self) -> np.ndarray:
        """All noiseless values, shape ``(N, |X|)``; counts as one truth read."""
        self.n_truth_reads += 1
        return self._table

    def blackbox(self) -> "Blackbox":
        return Blackbox(self)


class Blackbox:
    """The algorithm-facing view of a :class:`GroundTruth`.

    Exposes the grid, the noise level, each scenario's uncertainty parameter
    (needed to build its kernel) and noisy queries; never the truth tables.
    """

    def __init__(self, gt: GroundTruth):
        self._gt = gt
        self.grid = gt.grid
        self.noise_var = gt.noise_var
        self.deltas = tuple(s.delta for s in gt.scenarios)
        self.kernels = tuple(gt.scenarios.kernels())

    @property
    def n_scenarios(self) -> int:
        return len(self.deltas)

    def query(self, x_index: int, scenario_id: int) -> float:
        return self._gt.query(x_index, scenario_id)
