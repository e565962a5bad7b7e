"""Quick-look figures for experiment tables.

These are diagnostic renderings of the CSV/JSON data, not styled
reproductions: the delimited tables remain the data contract, the PNGs
exist so a scan can be sanity-checked without loading anything.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .output import Table

__all__ = ["render_table"]


def _finite(a: np.ndarray) -> np.ndarray:
    return a[np.isfinite(a)]


def _plot_oqsl_curve(table: Table, ax) -> None:
    ax.plot(table.column("delta"), table.column("tau"))
    ax.set_xlabel("delta")
    ax.set_ylabel("tau")


def _plot_profiles(table: Table, ax) -> None:
    deltas = table.column("delta")
    phis = table.column("phi")
    ratio = table.column("ratio")
    for d in np.unique(deltas):
        sel = deltas == d
        ax.plot(phis[sel], 1.0 + ratio[sel], label=f"delta={d:g}")
    ax.set_yscale("log")
    ax.set_xlabel("phi")
    ax.set_ylabel("tau_bd / tau")
    ax.legend(fontsize=8)


def _plot_ratio_grid(table: Table, ax) -> None:
    phis = np.unique(table.column("phi"))
    deltas = np.unique(table.column("delta"))
    ratio = table.column("ratio").reshape(phis.size, deltas.size)
    bands = np.digitize(ratio, [0.01, 0.10])
    mesh = ax.pcolormesh(
        deltas, phis, bands, cmap="gray_r", vmin=0, vmax=2, shading="auto"
    )
    ax.figure.colorbar(mesh, ax=ax, ticks=[0, 1, 2], label="ratio band")
    ax.set_xlabel("delta")
    ax.set_ylabel("phi")


def _plot_reach_counts(table: Table, ax) -> None:
    ax.plot(table.column("gamma0"), table.column("fraction"), marker="o")
    ax.set_xlabel("gamma0")
    ax.set_ylabel("reach fraction")
    ax.set_ylim(-0.05, 1.05)


def _plot_bd_test(table: Table, ax) -> None:
    diffs = _finite(table.column("diff"))
    ax.hist(diffs, bins=120)
    ax.axvline(0.0, color="k", lw=0.8)
    ax.set_xlabel("t_hit - tau_bd")
    ax.set_ylabel("count")


def _plot_xy_scan(table: Table, ax) -> None:
    x = table.column("x")
    y = table.column("y")
    in_s = table.column("in_s") == 1.0
    violation = table.column("violation") == 1.0
    ax.scatter(x[~in_s], y[~in_s], s=2, c="lightgray", label="outside")
    ok = in_s & ~violation
    ax.scatter(x[ok], y[ok], s=2, c="tab:green", label="t >= tau_m")
    ax.scatter(x[violation], y[violation], s=4, c="tab:red", label="violation")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(fontsize=8, markerscale=3)


def _plot_h_min(table: Table, ax) -> None:
    theta = table.column("theta")
    ax.plot(theta, table.column("h1_min"), label="h1 min")
    ax.plot(theta, table.column("h2_min"), label="h2 min")
    ax.axhline(1.0, color="k", lw=0.8, ls="--")
    ax.set_xlabel("theta")
    ax.set_ylabel("minimum")
    ax.legend(fontsize=8)


def _plot_trajectory(table: Table, ax) -> None:
    ax.plot(table.column("t"), table.column("theta"))
    ax.set_xlabel("t")
    ax.set_ylabel("Bloch angle")


def _plot_generic(table: Table, ax) -> None:
    numeric = []
    for name in table.header:
        col = table.column(name)
        if np.isfinite(col).any():
            numeric.append((name, col))
        if len(numeric) == 2:
            break
    if len(numeric) == 2:
        (xn, xs), (yn, ys) = numeric
        ax.plot(xs, ys, marker="o" if xs.size < 64 else None)
        ax.set_xlabel(xn)
        ax.set_ylabel(yn)
    else:
        ax.text(0.5, 0.5, "no numeric columns", ha="center", va="center")


_RENDERERS = {
    "oqsl_curve": _plot_oqsl_curve,
    "profiles": _plot_profiles,
    "ratio_grid": _plot_ratio_grid,
    "reach_counts": _plot_reach_counts,
    "bd_test": _plot_bd_test,
    "xy_scan": _plot_xy_scan,
    "validity_grid": _plot_xy_scan,
    "h_min": _plot_h_min,
    "trajectory": _plot_trajectory,
}


def render_table(table: Table, path: str | Path) -> Path:
    """Render one table to a PNG at path and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, ax = plt.subplots(figsize=(6.0, 4.2), dpi=130)
    try:
        _RENDERERS.get(table.name, _plot_generic)(table, ax)
        ax.set_title(table.name)
        fig.tight_layout()
        fig.savefig(path)
    finally:
        plt.close(fig)
    return path
