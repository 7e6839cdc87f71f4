"""Figure rendering for the report paths of the CLI.

matplotlib is imported lazily and driven through the Agg backend, so figure
output works headless and costs nothing when unused.
"""

from __future__ import annotations

from typing import Sequence

from .mc import GridRow
from .voi import EvpiCurve

_STYLE = {"closed": ("solid", "tab:blue"), "bootstrap": ("dashed", "tab:orange")}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def save_curve_plot(curves: EvpiCurve | Sequence[EvpiCurve], path: str) -> None:
    """Plot one or more EVPI curves over willingness-to-pay and save to path."""
    if isinstance(curves, EvpiCurve):
        curves = [curves]
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for curve in curves:
        linestyle, color = _STYLE.get(curve.method, ("solid", None))
        ax.plot(curve.wtps, curve.values, linestyle=linestyle, color=color, label=curve.method)
    ax.set_xlabel("willingness to pay per effectiveness unit")
    ax.set_ylabel("EVPI")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_grid_plot(rows: Sequence[GridRow], path: str) -> None:
    """Two-panel diagnostic of a verification grid: agreement and z-scores."""
    plt = _pyplot()
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.5))

    closed = [r.closed for r in rows]
    mc = [r.mc for r in rows]
    ax1.plot(closed, mc, ".", markersize=4)
    lo, hi = min(closed + mc), max(closed + mc)
    ax1.plot([lo, hi], [lo, hi], "-", color="gray", linewidth=0.8)
    ax1.set_xlabel("closed form")
    ax1.set_ylabel("Monte Carlo mean")
    ax1.set_title("agreement")

    z = [r.diff / r.mc_se if r.mc_se > 0 else 0.0 for r in rows]
    ax2.plot(range(len(z)), z, ".", markersize=4)
    for bound in (-4, 4):
        ax2.axhline(bound, color="tab:red", linewidth=0.8)
    ax2.set_xlabel("grid cell")
    ax2.set_ylabel("(closed - mc) / se")
    ax2.set_title("standardised differences")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
