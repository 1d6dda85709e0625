"""Command-line entry point: ``scenario-ucb {run,sweep,sample-complexity,validate}``.

Exit codes: 0 success, 2 configuration error, 3 numerical error,
4 validation failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, parse_floats
from .errors import ConfigError, ContractViolation, NumericalError
from .experiment import shape_checks, simulate, sweep
from .io import (
    CURVE_HEADER,
    TRACE_HEADER,
    curve_rows,
    trace_rows,
    write_csv,
    write_manifest,
    write_plot_data,
)
from .scenario import sample_count_corollary1, sample_count_redraw, sample_count_theorem2
from .validation import SUITES, run_suite

log = logging.getLogger("scenario_ucb")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 2, 3, 4


def _nu_tag(nu: float) -> str:
    return f"{nu:g}"


def load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        cfg.set(*item.split("=", 1))
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.reps is not None:
        cfg.repetitions = args.reps
    if args.T is not None:
        cfg.T = args.T
    if args.jobs is not None:
        cfg.jobs = args.jobs
    if getattr(args, "nu", None):
        nus = parse_floats(args.nu, "--nu")
        cfg.nu_list = ",".join(_nu_tag(v) for v in nus)
        if len(nus) == 1:
            cfg.nu = nus[0]
    return cfg.validate()


def _manifest(cfg: ExperimentConfig, out: Path, command: str) -> None:
    write_manifest(out / "manifest.txt", cfg.to_text(), {"command": command, "version": __version__})


def cmd_run(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    result = simulate(cfg, cfg.seed)
    curve = next(iter(result.curves.values()))
    write_csv(out / "trace.csv", TRACE_HEADER, trace_rows(result.trace, curve))
    write_csv(out / "curve.csv", CURVE_HEADER, curve_rows(curve))
    t = np.arange(1, len(curve) + 1)
    series = {
        f"r_redraw_avg nu={_nu_tag(cfg.nu)}": (t, curve.r_redraw_avg),
        "r_nodraw_avg": (t, curve.r_nodraw_avg),
        "bound": (t, curve.bound),
    }
    write_plot_data(out / "plot_data.txt", series)
    if cfg.plot:
        from .plotting import plot_regret

        plot_regret(out / "regret.png", {k: v for k, v in series.items() if k != "bound"},
                    title=f"N={result.n_scenarios}, seed={cfg.seed}")
    _manifest(cfg, out, "run")
    print(f"run: T={cfg.T} N={result.n_scenarios} final r_redraw_avg={curve.r_redraw_avg[-1]:.6g} -> {out}")
    return EXIT_OK


def cmd_sweep(cfg: ExperimentConfig) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    summary = sweep(cfg)
    agg_rows = []
    series = {}
    for nu in summary.nus:
        rows = []
        for r, curve in enumerate(summary.per_rep[nu]):
            seed = cfg.seed + r
            rows.extend((seed, k + 1, curve[k]) for k in range(curve.shape[0]))
        write_csv(out / f"curve_nu{_nu_tag(nu)}.csv", ("seed", "t", "r_redraw_avg"), rows)
        for k, t in enumerate(summary.t):
            agg_rows.append((nu, int(t), summary.mean[nu][k], summary.sem[nu][k],
                             summary.mean_nodraw[nu][k], summary.mean_bound[nu][k]))
        series[f"nu={_nu_tag(nu)}"] = (summary.t, summary.mean[nu])
    write_csv(out / "aggregate.csv", ("nu", "t", "mean_r_redraw_avg", "sem", "mean_r_nodraw_avg", "mean_bound"),
              agg_rows)
    write_plot_data(out / "plot_data.txt", series)
    if cfg.plot:
        from .plotting import plot_regret

        bands = {f"nu={_nu_tag(nu)}": (summary.mean[nu] - summary.sem[nu], summary.mean[nu] + summary.sem[nu])
                 for nu in summary.nus}
        plot_regret(out / "regret_sweep.png", series, bands=bands,
                    title=f"mean over {cfg.repetitions} seeds")
    checks = shape_checks(summary, early_t=min(100, cfg.T), mid_t=min(200, cfg.T))
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in checks]
    (out / "summary.txt").write_text("\n".join(lines) + "\n")
    _manifest(cfg, out, "sweep")
    print("\n".join(lines))
    return EXIT_OK


def cmd_sample_complexity(eta: float, zeta: float, alpha_T: float) -> int:
    n2 = sample_count_theorem2(eta, zeta)
    n1 = sample_count_corollary1(eta, zeta)
    nr = sample_count_redraw(eta, zeta, alpha_T)
    print(f"{'eta':>8} {'zeta':>8} {'alpha_T':>8} {'N_thm2':>8} {'N_cor1':>8} {'N_redraw':>8}")
    print(f"{eta:>8g} {zeta:>8g} {alpha_T:>8g} {n2:>8d} {n1:>8d} {nr:>8d}")
    return EXIT_OK


def cmd_validate(cfg: ExperimentConfig, suite: str) -> int:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    report = run_suite(suite, cfg)
    (out / f"validate_{suite}.txt").write_text(report.to_text())
    _manifest(cfg, out, f"validate {suite}")
    print(report.line())
    return EXIT_OK if report.passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scenario-ucb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, nu=True):
        p.add_argument("--config", help="key = value config file (a saved manifest works too)")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--reps", type=int, help="repetitions")
        p.add_argument("--T", type=int, help="horizon")
        p.add_argument("--jobs", type=int, help="worker processes")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
        if nu:
            p.add_argument("--nu", help="comma-separated re-draw exponents")

    common(sub.add_parser("run", help="single Scenario-UCB run"))
    common(sub.add_parser("sweep", help="regret curves for several re-draw exponents"))
    p = sub.add_parser("sample-complexity", help="scenario counts for (eta, zeta, alpha(T))")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--zeta", type=float, required=True)
    p.add_argument("--alpha-T", type=float, default=1.0, dest="alpha_T")
    p = sub.add_parser("validate", help="Monte-Carlo check of a probabilistic guarantee")
    common(p)
    p.add_argument("--suite", required=True, choices=SUITES)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "sample-complexity":
            return cmd_sample_complexity(args.eta, args.zeta, args.alpha_T)
        cfg = load_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_validate(cfg, args.suite)
    except (ConfigError, ContractViolation) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
