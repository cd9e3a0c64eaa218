"""Render figure analogues from the simulator's CSV outputs.

This package only reads CSV files produced by the `d2d-discovery figures`
command; it contains no simulation or analytic logic of its own.  Each
figure overlays empirical results (markers) on analytic curves (lines),
with one legend entry per series group.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


class SchemaError(ValueError):
    """A CSV is missing, empty, or lacks a required column."""


# colour cycle shared by all figures so rendering is style-stable
_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red",
           "tab:purple", "tab:brown", "tab:pink", "tab:gray")
_MARKERS = ("o", "s", "^", "d", "v", "*", "P", "X")


@dataclass(frozen=True)
class FigureSpec:
    """What to read and how to draw one figure.

    csv_name      file to load from the figure's directory (or from each
                  N<k>/ subdirectory when per_pair_count is set)
    group_column  CSV column whose distinct values define the series groups
    """

    figure_id: str
    csv_name: str
    group_column: str
    xlabel: str
    ylabel: str
    xscale: str = "linear"
    per_pair_count: bool = False
    group_label: str = field(default="")


FIGURE_SPECS = {
    "fig2": FigureSpec("fig2", "sir_ccdf.csv", "tau_db",
                       "transmitter density", "P(SIR <= threshold)",
                       xscale="log", group_label="threshold {} dB"),
    "fig3": FigureSpec("fig3", "sir_ccdf.csv", "sweep_value",
                       "SIR threshold (dB)", "P(SIR >= threshold)",
                       group_label="density {}"),
    "fig4": FigureSpec("fig4", "success.csv", "pair_count",
                       "transmitter density", "per-slot success probability",
                       xscale="log", per_pair_count=True,
                       group_label="{} pairs"),
    "fig5": FigureSpec("fig5", "slots.csv", "sweep_value",
                       "slots elapsed", "P(discovered within n slots)",
                       group_label="{} pairs"),
    "fig6": FigureSpec("fig6", "slots.csv", "pair_count",
                       "transmitter density", "slots for 90% discovery",
                       xscale="log", per_pair_count=True,
                       group_label="{} pairs"),
}


def read_rows(path: Path, required_columns) -> list[dict]:
    """Load a CSV, insisting on the required columns and at least one row."""
    if not path.exists():
        raise SchemaError(f"missing CSV file: {path}")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in required_columns:
            if col not in header:
                raise SchemaError(f"{path}: missing column '{col}'")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _load_groups(spec: FigureSpec, csv_dir: Path, columns):
    """Return [(group value, rows)] in deterministic order."""
    fig_dir = csv_dir / spec.figure_id
    if spec.per_pair_count:
        subdirs = sorted((d for d in fig_dir.iterdir() if d.is_dir()
                          and d.name.startswith("N")),
                         key=lambda d: int(d.name[1:])) if fig_dir.is_dir() else []
        if not subdirs:
            raise SchemaError(f"no N<k> subdirectories under {fig_dir}")
        return [(d.name[1:], read_rows(d / spec.csv_name, columns))
                for d in subdirs]
    rows = read_rows(fig_dir / spec.csv_name, columns)
    groups = {}
    for row in rows:
        groups.setdefault(row[spec.group_column], []).append(row)
    return sorted(groups.items(), key=lambda kv: float(kv[0]))


def _series(rows, x_col, y_col):
    """Numeric (x, y) pairs, skipping blank cells (simulate-only CSVs)."""
    pts = [(float(r[x_col]), float(r[y_col])) for r in rows if r[y_col] != ""]
    return sorted(pts)


def _quantile_slots(rows, cdf_col, target=0.9):
    """Smallest n whose CDF reaches the target, or None if never."""
    for n, c in _series(rows, "n", cdf_col):
        if c >= target:
            return n
    return None


def _figure_series(spec: FigureSpec, group_rows):
    """[(label, empirical pts, analytic pts)] for one figure."""
    out = []
    for value, rows in group_rows:
        label = spec.group_label.format(value)
        if spec.figure_id == "fig2":
            emp = [(x, 1.0 - y) for x, y in
                   _series(rows, "sweep_value", "empirical")]
            ana = [(x, 1.0 - y) for x, y in
                   _series(rows, "sweep_value", "analytic")]
        elif spec.figure_id == "fig3":
            emp = _series(rows, "tau_db", "empirical")
            ana = _series(rows, "tau_db", "analytic")
        elif spec.figure_id == "fig4":
            emp = _series(rows, "sweep_value", "p_success_emp")
            ana = _series(rows, "sweep_value", "p_success_analytic")
        elif spec.figure_id == "fig5":
            emp = _series(rows, "n", "cdf_emp")
            ana = _series(rows, "n", "cdf_analytic")
        else:  # fig6: one point per density value in the per-N CSV
            by_value = {}
            for row in rows:
                by_value.setdefault(row["sweep_value"], []).append(row)
            emp, ana = [], []
            for sweep_value, value_rows in sorted(by_value.items(),
                                                  key=lambda kv: float(kv[0])):
                q = _quantile_slots(value_rows, "cdf_emp")
                if q is not None:
                    emp.append((float(sweep_value), q))
                req = value_rows[0]["required_slots_analytic"]
                if req != "":
                    ana.append((float(sweep_value), float(req)))
        out.append((label, emp, ana))
    return out


_COLUMNS = {
    "sir_ccdf.csv": ("sweep_value", "tau_db", "empirical", "analytic"),
    "success.csv": ("sweep_value", "p_success_emp", "p_success_analytic",
                    "n_opportunities"),
    "slots.csv": ("sweep_value", "n", "cdf_emp", "cdf_analytic",
                  "required_slots_analytic"),
}


def render(figure_id: str, csv_dir: Path, out_dir: Path) -> Path:
    """Draw one figure analogue and return the written image path."""
    if figure_id not in FIGURE_SPECS:
        raise SchemaError(f"unknown figure id '{figure_id}'")
    spec = FIGURE_SPECS[figure_id]
    series = _figure_series(
        spec, _load_groups(spec, csv_dir, _COLUMNS[spec.csv_name]))
    if not any(emp or ana for _, emp, ana in series):
        raise SchemaError(f"{figure_id}: no plottable data")

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, (label, emp, ana) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        marker = _MARKERS[i % len(_MARKERS)]
        if ana:
            ax.plot(*zip(*ana), color=color, linestyle="-", label=label)
        if emp:
            ax.plot(*zip(*emp), color=color, marker=marker, linestyle="none",
                    label=label if not ana else "_nolegend_")
    ax.set_xscale(spec.xscale)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    ax.grid(True, alpha=0.3)
    ax.legend()
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{figure_id}.png"
    # fixed metadata keeps the PNG bytes independent of library version
    fig.savefig(out_path, dpi=100, metadata={"Software": "plot_figures"})
    plt.close(fig)
    return out_path
