"""CSV, manifest and plot-data writers."""

from __future__ import annotations

import numbers
from pathlib import Path
from typing import Iterable, Sequence

TRACE_HEADER = ("t", "redraw_count", "x_index", "i_t", "y_t", "sigma_it", "beta_t", "r_inst", "r_redraw_avg", "bound")
CURVE_HEADER = ("t", "j_redraw", "r_redraw_avg", "r_nodraw_avg", "gamma", "bound")


def fmt_number(v) -> str:
    """12 significant digits for reals, plain digits for integers."""
    if isinstance(v, (bool,)):
        return str(int(v))
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return format(float(v), ".12g")
    return str(v)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
        lines.append(",".join(fmt_number(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    lines = Path(path).read_text().splitlines()
    return lines[0].split(","), [ln.split(",") for ln in lines[1:] if ln]


def trace_rows(trace, curve) -> list[tuple]:
    rows = []
    for k, d in enumerate(trace.decisions):
        rows.append((
            d.t,
            int(curve.redraw_count[k]),
            d.x_index,
            0 if d.scenario_index is None else d.scenario_index,
            d.y,
            trace.sigmas[k],
            trace.betas[k],
            curve.r_inst[k],
            curve.r_redraw_avg[k],
            curve.bound[k],
        ))
    return rows


def curve_rows(curve) -> list[tuple]:
    return [
        (k + 1, curve.j_redraw[k], curve.r_redraw_avg[k], curve.r_nodraw_avg[k], curve.gamma[k], curve.bound[k])
        for k in range(len(curve))
    ]


def write_manifest(path, config_text: str, meta: dict) -> Path:
    """Config lines followed by ``_``-prefixed metadata that config parsing skips."""
    path = Path(path)
    extra = "".join(f"_{k} = {v}\n" for k, v in sorted(meta.items()))
    path.write_text(config_text + extra)
    return path


def write_plot_data(path, series: dict[str, tuple[Sequence, Sequence]]) -> Path:
    """One ``x y`` pair per line; series are headed by ``# <name>`` and separated by blank lines."""
    path = Path(path)
    chunks = []
    for name, (xs, ys) in series.items():
        body = "\n".join(f"{fmt_number(x)} {fmt_number(y)}" for x, y in zip(xs, ys))
        chunks.append(f"# {name}\n{body}\n")
    path.write_text("\n".join(chunks))
    return path


def read_plot_data(path) -> dict[str, tuple[list[float], list[float]]]:
    series: dict[str, tuple[list[float], list[float]]] = {}
    current = None
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            current = line[2:]
            series[current] = ([], [])
        elif line.strip():
            x, y = line.split()
            series[current][0].append(float(x))
            series[current][1].append(float(y))
    return series
