"""Experiment configuration as a flat ``key = value`` text file."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .kernel import AffineLengthscale, Grid, KernelSpec
from .scenario import DeltaDistribution, RedrawSchedule, sample_count_redraw


@dataclass
class ExperimentConfig:
    grid_min: float = 0.0
    grid_max: float = 1.0
    grid_step: float = 0.01
    grid_points: str = ""
    kernel: str = "squared_exponential"
    lengthscale_base: float = 0.05
    lengthscale_slope: float = 0.01
    delta_dist: str = "uniform"
    delta_low: float = 0.0
    delta_high: float = 1.0
    n_scenarios: str = "20"
    T: int = 1000
    rho2: float = 0.01
    epsilon: float = 0.1
    eta: float = 0.1
    zeta: float = 0.05
    nu: float = 0.1
    nu_list: str = "0.1,0.4,1"
    alpha_table: str = ""
    seed: int = 0
    repetitions: int = 20
    outer_draws: int = 2000
    inner_samples: int = 5000
    jobs: int = 1
    plot: int = 1
    out: str = "results"

    # -- parsing -------------------------------------------------------------

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def set(self, key: str, raw: str) -> None:
        key = key.strip()
        names = {f.name: f for f in fields(self)}
        if key not in names:
            raise ConfigError(f"unknown config key {key!r}")
        kind = names[key].type
        raw = raw.strip()
        try:
            if kind in ("int", int):
                value = int(raw)
            elif kind in ("float", float):
                value = float(raw)
            else:
                value = raw
        except ValueError:
            raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}") from None
        setattr(self, key, value)

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        cfg = cls()
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected key = value")
            key, value = line.split("=", 1)
            if key.strip().startswith("_"):
                continue  # manifest metadata
            cfg.set(key, value)
        return cfg

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text)

    def to_text(self) -> str:
        return "".join(f"{k} = {_fmt(v)}\n" for k, v in dataclasses.asdict(self).items())

    def copy(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    # -- derived objects -----------------------------------------------------

    def grid(self) -> Grid:
        if self.grid_points.strip():
            return Grid(parse_floats(self.grid_points, "grid_points"))
        return Grid.arange(self.grid_min, self.grid_max, self.grid_step)

    def kernel_spec(self) -> KernelSpec:
        return KernelSpec(self.kernel, 0.0, AffineLengthscale(self.lengthscale_base, self.lengthscale_slope))

    def delta_distribution(self) -> DeltaDistribution:
        return DeltaDistribution(self.delta_dist, self.delta_low, self.delta_high)

    def nus(self) -> list[float]:
        return parse_floats(self.nu_list, "nu_list")

    def schedule(self, nu: float | None = None) -> RedrawSchedule:
        if self.alpha_table.strip() and nu is None:
            return RedrawSchedule(self.T, table=parse_floats(self.alpha_table, "alpha_table"))
        return RedrawSchedule(self.T, nu=self.nu if nu is None else nu)

    def scenario_count(self, nu: float | None = None) -> int:
        raw = self.n_scenarios.strip().lower()
        if raw == "auto":
            alpha_T = self.schedule(nu).alpha(self.T)
            return sample_count_redraw(self.eta, self.zeta, alpha_T)
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"n_scenarios must be an integer or 'auto', got {raw!r}") from None
        return n

    def validate(self) -> "ExperimentConfig":
        """Check every field against the preconditions of the operations it feeds."""
        problems = []
        try:
            grid = self.grid()
        except Exception as exc:
            problems.append(f"grid: {exc}")
            grid = None
        try:
            self.kernel_spec().validate()
            for d in (self.delta_low, self.delta_high):
                self.kernel_spec().with_delta(d).validate()
        except Exception as exc:
            problems.append(f"kernel: {exc}")
        try:
            self.delta_distribution()
        except ConfigError as exc:
            problems.append(f"delta_dist: {exc}")
        if self.T < 1:
            problems.append("T: must be >= 1")
        if not self.rho2 > 0:
            problems.append("rho2: must be > 0")
        for name in ("epsilon", "eta", "zeta"):
            v = getattr(self, name)
            if not 0 < v < 1:
                problems.append(f"{name}: must lie in (0, 1)")
        try:
            nus = self.nus()
            if not nus:
                problems.append("nu_list: empty")
            for v in nus + [self.nu]:
                if not 0 < v <= 1:
                    problems.append(f"nu: {v} not in (0, 1]")
        except ConfigError as exc:
            problems.append(str(exc))
        if self.T >= 1 and not problems:
            try:
                self.schedule()
                if self.scenario_count() < 1:
                    problems.append("n_scenarios: must be >= 1")
            except Exception as exc:
                problems.append(f"schedule/n_scenarios: {exc}")
        for name in ("repetitions", "outer_draws", "inner_samples", "jobs"):
            if getattr(self, name) < 1:
                problems.append(f"{name}: must be >= 1")
        if grid is not None and len(grid) < 1:
            problems.append("grid: empty")
        if problems:
            raise ConfigError("; ".join(problems))
        return self


def parse_floats(raw: str, name: str) -> list[float]:
    try:
        return [float(v) for v in raw.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{name}: expected a comma-separated list of numbers") from None


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)
