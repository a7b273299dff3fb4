"""The four figure kinds rendered from simulator CSVs.

kind "cdf"   <- cdf_se.csv / cdf_he.csv      (variant, sample)
kind "sweep" <- rho_sweep.csv                 (variant, rho, median_se)
kind "map"   <- trajectory_<scheme>.csv       (slot, x, y, ...) one or more
                + trajectory_positions.csv    (role, x, y) exactly one
kind "bars"  <- trajectory_summary.csv        (scheme, avg_se[, avg_se_lsfd])

Everything is drawn exactly as found in the files — no statistics beyond
sorting, counting, and means of the columns being displayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import theme
from .io import PlotInputError, floats, read_rows, require_columns

KINDS = ("cdf", "sweep", "map", "bars")


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: input CSVs, figure kind, labels, output image path."""

    kind: str
    inputs: tuple[str, ...]
    out_path: str
    labels: tuple[str, ...] | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotInputError(
                f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise PlotInputError("no input CSVs given")


def empirical_cdf(samples) -> tuple[np.ndarray, np.ndarray]:
    """Step-curve coordinates spanning [0, 1] for one sample set."""
    xs = np.sort(np.asarray(samples, dtype=float))
    if xs.size == 0:
        raise PlotInputError("empirical CDF of zero samples")
    x = np.concatenate([[xs[0]], xs])
    y = np.linspace(0.0, 1.0, xs.size + 1)
    return x, y


def _apply_labels(spec: PlotSpec, defaults: list[str]) -> list[str]:
    if spec.labels is None:
        return defaults
    if len(spec.labels) != len(defaults):
        raise PlotInputError(
            f"{len(spec.labels)} label(s) given for {len(defaults)} series")
    return list(spec.labels)


def _grouped_samples(spec: PlotSpec) -> dict[str, list[float]]:
    groups: dict[str, list[float]] = {}
    for path in spec.inputs:
        rows = read_rows(path)
        require_columns(path, rows, ("variant", "sample"))
        for row in rows:
            groups.setdefault(row["variant"], []).append(float(row["sample"]))
    if not groups:
        raise PlotInputError(f"{spec.inputs[0]}: no data rows")
    return groups


def _cdf_figure(spec: PlotSpec, ax) -> None:
    groups = _grouped_samples(spec)
    labels = _apply_labels(spec, list(groups))
    for idx, (variant, samples) in enumerate(groups.items()):
        x, y = empirical_cdf(samples)
        ax.plot(x, y, drawstyle="steps-post", label=labels[idx],
                color=theme.color_for(variant, idx), linewidth=1.8)
    ax.set_xlabel("sample")
    ax.set_ylabel("cumulative probability")
    ax.set_ylim(0.0, 1.0)
    ax.legend()


def _sweep_figure(spec: PlotSpec, ax) -> None:
    series: dict[str, list[tuple[float, float]]] = {}
    many = len(spec.inputs) > 1
    for path in spec.inputs:
        rows = read_rows(path)
        require_columns(path, rows, ("variant", "rho", "median_se"))
        stem = Path(path).stem
        for row in rows:
            name = (f"{stem}:{row['variant']}" if many else row["variant"])
            series.setdefault(name, []).append(
                (float(row["rho"]), float(row["median_se"])))
    if not series:
        raise PlotInputError(f"{spec.inputs[0]}: no data rows")
    labels = _apply_labels(spec, list(series))
    for idx, (name, points) in enumerate(series.items()):
        points.sort()
        rho = [p[0] for p in points]
        med = [p[1] for p in points]
        ax.plot(rho, med, marker="o", markersize=4, label=labels[idx],
                color=theme.color_for(name, idx), linewidth=1.8)
    ax.set_xlabel("time-splitting fraction rho")
    ax.set_ylabel("median SE")
    ax.legend()


def _classify_map_inputs(spec: PlotSpec):
    paths, positions = [], []
    for path in spec.inputs:
        rows = read_rows(path)
        header = set(rows[0]) if rows else set()
        if {"role", "x", "y"} <= header:
            positions.append((path, rows))
        elif {"slot", "x", "y"} <= header:
            paths.append((path, rows))
        else:
            raise PlotInputError(
                f"{path}: neither a per-slot log (slot, x, y, ...) nor a "
                f"positions file (role, x, y)")
    if len(positions) != 1:
        raise PlotInputError(
            f"map needs exactly one positions CSV (role, x, y); "
            f"got {len(positions)}")
    if not paths:
        raise PlotInputError("map needs at least one per-slot trajectory CSV")
    return paths, positions[0]


def _map_figure(spec: PlotSpec, ax) -> None:
    paths, (pos_path, pos_rows) = _classify_map_inputs(spec)
    if not pos_rows:
        raise PlotInputError(f"{pos_path}: no data rows")
    defaults = [Path(p).stem.removeprefix("trajectory_") for p, _ in paths]
    labels = _apply_labels(spec, defaults)
    for idx, (path, rows) in enumerate(paths):
        if not rows:
            raise PlotInputError(f"{path}: no data rows")
        ax.plot(floats(rows, "x"), floats(rows, "y"), label=labels[idx],
                color=theme.COLOR_CYCLE[idx % len(theme.COLOR_CYCLE)],
                linewidth=1.4, zorder=3)
    by_role: dict[str, list[tuple[float, float]]] = {}
    for row in pos_rows:
        by_role.setdefault(row["role"], []).append(
            (float(row["x"]), float(row["y"])))
    for role, points in by_role.items():
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        style = theme.ROLE_STYLES.get(role, dict(marker="o", s=40))
        ax.scatter(xs, ys, label=role, **style)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(fontsize=8)


def _bars_figure(spec: PlotSpec, ax) -> None:
    if len(spec.inputs) != 1:
        raise PlotInputError("bars takes exactly one summary CSV")
    path = spec.inputs[0]
    rows = read_rows(path)
    require_columns(path, rows, ("scheme", "avg_se"))
    if not rows:
        raise PlotInputError(f"{path}: no data rows")
    with_fused = "avg_se_lsfd" in rows[0]
    schemes: list[str] = []
    acc: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        scheme = row["scheme"]
        if scheme not in acc:
            schemes.append(scheme)
            acc[scheme] = []
        acc[scheme].append((float(row["avg_se"]),
                            float(row["avg_se_lsfd"]) if with_fused else 0.0))
    x = np.arange(len(schemes))
    equal_means = [float(np.mean([v[0] for v in acc[s]])) for s in schemes]
    series = [("equal weighting", equal_means)]
    if with_fused:
        fused_means = [float(np.mean([v[1] for v in acc[s]]))
                       for s in schemes]
        series.append(("fused weighting", fused_means))
    labels = _apply_labels(spec, [name for name, _ in series])
    width = 0.8 / len(series)
    for idx, (_, values) in enumerate(series):
        offset = (idx - (len(series) - 1) / 2.0) * width
        ax.bar(x + offset, values, width=width, label=labels[idx],
               color=theme.BAR_COLORS[idx % len(theme.BAR_COLORS)])
    ax.set_xticks(x)
    ax.set_xticklabels(schemes)
    ax.set_ylabel("average SE")
    ax.legend()


_BUILDERS = {
    "cdf": _cdf_figure,
    "sweep": _sweep_figure,
    "map": _map_figure,
    "bars": _bars_figure,
}


def build_figure(spec: PlotSpec):
    """Draw the requested figure and return the matplotlib Figure."""
    figsize = theme.MAP_FIGSIZE if spec.kind == "map" else theme.FIGSIZE
    fig, ax = plt.subplots(figsize=figsize, dpi=theme.DPI)
    try:
        _BUILDERS[spec.kind](spec, ax)
        if spec.title:
            ax.set_title(spec.title)
        ax.grid(True, **theme.GRID)
        fig.tight_layout()
    except Exception:
        plt.close(fig)
        raise
    return fig


def render(spec: PlotSpec) -> Path:
    """Render the figure to spec.out_path; returns the written path."""
    fig = build_figure(spec)
    out = Path(spec.out_path)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    metadata = theme.PNG_METADATA if out.suffix.lower() == ".png" else None
    try:
        fig.savefig(out, metadata=metadata)
    finally:
        plt.close(fig)
    return out
