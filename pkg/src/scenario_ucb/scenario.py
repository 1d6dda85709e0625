"""Scenario sampling, sample-complexity formulas and the re-draw schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, ContractViolation, ScheduleError
from .kernel import Grid, KernelSpec

STREAMS = ("scenarios", "realizations", "redraw", "noise")


class SeedBundle:
    """Independent random streams derived from one master seed.

    Each named stream (see ``STREAMS``) is spawned from
    :class:`numpy.random.SeedSequence`, so varying the draws of one stream
    never perturbs another.
    """

    def __init__(self, master: int, overrides: dict[str, int] | None = None):
        self.master = int(master)
        self.overrides = dict(overrides or {})
        children = np.random.SeedSequence(self.master).spawn(len(STREAMS))
        self._seqs = dict(zip(STREAMS, children))
        for name, value in self.overrides.items():
            if name not in self._seqs:
                raise ConfigError(f"unknown random stream {name!r}")
            self._seqs[name] = np.random.SeedSequence(int(value))

    def seq(self, stream: str) -> np.random.SeedSequence:
        return self._seqs[stream]

    def rng(self, stream: str) -> np.random.Generator:
        return np.random.default_rng(self._seqs[stream])

    def child_seed(self, stream: str, k: int) -> int:
        """A 64-bit integer seed for the k-th item of ``stream``."""
        base = self._seqs[stream]
        ss = np.random.SeedSequence(base.entropy, spawn_key=tuple(base.spawn_key) + (int(k),))
        return int(ss.generate_state(1, dtype=np.uint64)[0])

    def as_dict(self) -> dict:
        return {"master": self.master, **{f"override_{k}": v for k, v in sorted(self.overrides.items())}}


@dataclass(frozen=True)
class DeltaDistribution:
    """Distribution of the uncertain parameter; ``uniform`` on ``[low, high]`` or ``point``."""

    name: str = "uniform"
    low: float = 0.0
    high: float = 1.0

    def __post_init__(self):
        if self.name not in ("uniform", "point"):
            raise ConfigError(f"unsupported delta distribution {self.name!r}")
        if self.name == "uniform" and not self.high >= self.low:
            raise ConfigError("uniform delta distribution needs low <= high")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.name == "point":
            return np.full(n, float(self.low))
        return rng.uniform(self.low, self.high, size=n)


@dataclass(frozen=True, eq=False)
class Scenario:
    id: int
    delta: float
    realization: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class ScenarioSet:
    scenarios: tuple[Scenario, ...]
    rng_seed: int
    kernel: KernelSpec = field(default_factory=KernelSpec)

    def __post_init__(self):
        if len(self.scenarios) < 1:
            raise ContractViolation("a scenario set needs N >= 1")
        ids = [s.id for s in self.scenarios]
        if len(set(ids)) != len(ids):
            raise ContractViolation("scenario ids must be unique")

    def __len__(self) -> int:
        return len(self.scenarios)

    def __iter__(self) -> Iterator[Scenario]:
        return iter(self.scenarios)

    def __getitem__(self, i: int) -> Scenario:
        return self.scenarios[i]

    @property
    def deltas(self) -> np.ndarray:
        return np.array([s.delta for s in self.scenarios])

    def kernels(self) -> list[KernelSpec]:
        return [self.kernel.with_delta(s.delta) for s in self.scenarios]


def draw_scenarios(
    n: int,
    seed: int | SeedBundle,
    delta_dist: DeltaDistribution | None = None,
    grid: Grid | None = None,
    kernel: KernelSpec | None = None,
) -> ScenarioSet:
    """Draw ``n`` i.i.d. scenarios; with a grid, also materialize their realizations.

    The deltas come from the ``scenarios`` stream and each realization from a
    seed of the ``realizations`` stream, both of ``seed``'s bundle.
    """
    from .env import synthesize

    if n < 1:
        raise ContractViolation(f"need n >= 1 scenarios, got {n}")
    bundle = seed if isinstance(seed, SeedBundle) else SeedBundle(seed)
    delta_dist = delta_dist or DeltaDistribution()
    kernel = kernel or KernelSpec()
    deltas = delta_dist.sample(bundle.rng("scenarios"), n)
    scenarios = []
    for i, d in enumerate(deltas):
        real = None
        if grid is not None:
            real = synthesize(float(d), grid, bundle.child_seed("realizations", i), kernel)
            real.setflags(write=False)
        scenarios.append(Scenario(i, float(d), real))
    return ScenarioSet(tuple(scenarios), bundle.master, kernel)


def _check_unit(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ContractViolation(f"{name} must lie in (0, 1), got {value}")


def sample_count_theorem2(eta: float, zeta: float) -> int:
    """Smallest ``N >= log(1/zeta) / log(1/(1 - eta))``."""
    _check_unit("eta", eta)
    _check_unit("zeta", zeta)
    bound = math.log(1.0 / zeta) / -math.log1p(-eta)
    n = math.ceil(bound)
    # guard against ceil of a value that is an integer up to rounding
    if n - 1 >= 1 and (n - 1) * -math.log1p(-eta) >= math.log(1.0 / zeta) * (1 - 1e-12):
        n -= 1
    return max(n, 1)


def sample_count_corollary1(eta: float, zeta: float) -> int:
    """``ceil(log(1/zeta) / eta)``."""
    _check_unit("eta", eta)
    _check_unit("zeta", zeta)
    return math.ceil(math.log(1.0 / zeta) / eta)


def sample_count_redraw(eta: float, zeta: float, alpha_T: float) -> int:
    """``ceil(alpha(T) / eta * log(1/zeta))``; scenarios needed for robustness under re-draw."""
    _check_unit("eta", eta)
    _check_unit("zeta", zeta)
    if not alpha_T >= 1:
        raise ContractViolation(f"alpha(T) must be >= 1, got {alpha_T}")
    return math.ceil(alpha_T * math.log(1.0 / zeta) / eta)


class RedrawSchedule:
    """Frequency of re-draw ``alpha`` on ``1..T_max``.

    Either ``alpha(t) = t**nu`` or an explicit table ``alpha[t-1]``.
    Construction enforces ``1 <= alpha(t) <= t``.
    """

    def __init__(self, T_max: int, nu: float | None = None, table: Sequence[float] | None = None,
                 func: Callable[[int], float] | None = None):
        if T_max < 1:
            raise ScheduleError("horizon must be >= 1")
        given = [v is not None for v in (nu, table, func)]
        if sum(given) != 1:
            raise ScheduleError("give exactly one of nu, table or func")
        self.T_max = int(T_max)
        self.nu = nu
        t = np.arange(1, self.T_max + 1, dtype=float)
        if nu is not None:
            if not 0 <= nu <= 1:
                raise ScheduleError(f"exponent nu must lie in [0, 1], got {nu}")
            values = t**nu
        elif table is not None:
            values = np.asarray(table, dtype=float)
            if values.shape != (self.T_max,):
                raise ScheduleError(f"alpha table needs {self.T_max} entries, got {values.shape}")
        else:
            values = np.array([func(int(s)) for s in t], dtype=float)
        bad = np.flatnonzero((values < 1) | (values > t) | ~np.isfinite(values))
        if bad.size:
            k = bad[0]
            raise ScheduleError(f"alpha({k + 1}) = {values[k]} violates 1 <= alpha(t) <= t")
        self.values = values
        self.values.setflags(write=False)

    def alpha(self, t: int) -> float:
        if not 1 <= t <= self.T_max:
            raise ContractViolation(f"t={t} outside [1, {self.T_max}]")
        return float(self.values[t - 1])

    def describe(self) -> str:
        return f"t^{self.nu:g}" if self.nu is not None else "table"


def redraw_times(schedule: RedrawSchedule, T: int | None = None) -> list[int]:
    """Iterations at which a fresh extra scenario is drawn.

    ``t = 1`` always; afterwards every ``t`` where ``floor(alpha(t))`` exceeds
    ``floor(alpha(t-1))``.
    """
    T = schedule.T_max if T is None else int(T)
    if not 1 <= T <= schedule.T_max:
        raise ContractViolation(f"T={T} outside [1, {schedule.T_max}]")
    fl = np.floor(schedule.values[:T] + 1e-12)
    crossings = np.flatnonzero(fl[1:] > fl[:-1]) + 2
    return [1] + crossings.tolist()


def redraw_index_sequence(schedule: RedrawSchedule, T: int | None = None) -> np.ndarray:
    """For each ``t = 1..T`` the 0-based index of the active extra draw."""
    T = schedule.T_max if T is None else int(T)
    times = redraw_times(schedule, T)
    active = np.zeros(T, dtype=int)
    for k, start in enumerate(times):
        active[start - 1:] = k
    return active


def draw_redraws(
    times: Sequence[int],
    seed: int | SeedBundle,
    delta_dist: DeltaDistribution | None,
    grid: Grid,
    kernel: KernelSpec | None = None,
) -> list[tuple[int, Scenario]]:
    """Fresh extra scenarios, one per re-draw time, from the ``redraw`` stream.

    The k-th draw depends only on the seed and ``k``, so schedules sharing a
    seed also share their first draws.
    """
    from .env import synthesize

    bundle = seed if isinstance(seed, SeedBundle) else SeedBundle(seed)
    delta_dist = delta_dist or DeltaDistribution()
    out = []
    for k, t in enumerate(times):
        rng = np.random.default_rng(bundle.child_seed("redraw", k))
        delta = float(delta_dist.sample(rng, 1)[0])
        real = synthesize(delta, grid, rng, kernel)
        real.setflags(write=False)
        out.append((int(t), Scenario(-(k + 1), delta, real)))
    return out
