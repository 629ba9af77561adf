"""Figure-id registry: column requirements and rendering for each panel.

Rendering is a pure function of the table content; the physics lives
upstream in the CSV producer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import FigureTable, SchemaError  # noqa: E402


def _pivot(x: np.ndarray, y: np.ndarray, z: np.ndarray):
    """Rearrange flat sweep rows into a dense (x, y) matrix."""
    xu, xi = np.unique(x, return_inverse=True)
    yu, yi = np.unique(y, return_inverse=True)
    grid = np.full((xu.size, yu.size), np.nan)
    grid[xi, yi] = z
    if np.any(np.isnan(grid)):
        raise SchemaError("sweep rows do not form a complete rectangular grid")
    return xu, yu, grid


def _heatmap(table, xcol, ycol, zcol, xlabel, ylabel, title, cmap="viridis"):
    xu, yu, grid = _pivot(table.column(xcol), table.column(ycol), table.column(zcol))
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    mesh = ax.pcolormesh(xu, yu, grid.T, shading="nearest", cmap=cmap)
    fig.colorbar(mesh, ax=ax, label=title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    fig.tight_layout()
    return fig


def _grouped_lines(table, group_col, xcol, ycol, xlabel, ylabel, group_symbol):
    groups = table.column(group_col)
    xs = table.column(xcol)
    ys = table.column(ycol)
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    for value in np.unique(groups):
        sel = groups == value
        ax.plot(xs[sel], ys[sel], label=f"{group_symbol} = {value:g}")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend()
    fig.tight_layout()
    return fig


def _wigner_map(table, zcol, title):
    qu, pu, grid = _pivot(table.column("q"), table.column("p"), table.column(zcol))
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    bound = float(np.max(np.abs(grid)))
    mesh = ax.pcolormesh(qu, pu, grid.T, shading="nearest", cmap="RdBu_r",
                         vmin=-bound, vmax=bound)
    fig.colorbar(mesh, ax=ax, label="W")
    ax.contour(qu, pu, grid.T, levels=8, colors="k", linewidths=0.4)
    ax.set_xlabel("$q_l$")
    ax.set_ylabel("$p_l$")
    ax.set_title(title)
    ax.set_aspect("equal")
    fig.tight_layout()
    return fig


def fig2a(table):
    return _heatmap(table, "g", "tau", "fq", "$g$", r"$\tau$", "$F_Q$")


def fig2b(table):
    return _grouped_lines(table, "tau", "g", "fq", "$g$", "$F_Q$", r"$\tau$")


def fig2c(table):
    return _wigner_map(table, "w_pre", r"$W(q_l, p_l)$, $\tau = \pi$")


def fig2d(table):
    return _wigner_map(table, "w_pre", r"$W(q_l, p_l)$, $\tau = \pi/10$")


def fig3a(table):
    nbar = table.column("nbar")
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.plot(nbar, table.column("fq_max"), marker="o", label="optimized $F_Q$")
    ax.plot(nbar, table.column("fq_limit"), linestyle="--", color="k",
            label=r"$2/(1+2\bar{n})^2$")
    ax.set_xlabel(r"$\bar{n}$")
    ax.set_ylabel("$F_Q$")
    ax.legend()
    fig.tight_layout()
    return fig


def fig3b(table):
    fig, ax = plt.subplots(figsize=(5.0, 4.0))
    ax.plot(table.column("nbar"), table.column("g_max"), marker="o")
    ax.set_xlabel(r"$\bar{n}$")
    ax.set_ylabel(r"$g_{\max}$")
    fig.tight_layout()
    return fig


def fig4a(table):
    return _wigner_map(table, "w_pre", "$W$ before the Kerr medium")


def fig4b(table):
    return _wigner_map(table, "w_post", "$W$ after the Kerr medium")


def fig5a(table):
    return _heatmap(table, "chi", "nbar", "ratio", r"$\chi$", r"$\bar{n}$",
                    "$F_C/F_Q$")


def fig5b(table):
    return _heatmap(table, "chi", "nbar", "phi_star", r"$\chi$", r"$\bar{n}$",
                    r"$\Phi_{LO}^{*}$", cmap="twilight")


def fig5c(table):
    return _grouped_lines(table, "nbar", "phi_lo", "ratio",
                          r"$\Phi_{LO}$", "$F_C/F_Q$", r"$\bar{n}$")


def fig5d(table):
    return _grouped_lines(table, "nbar", "phi_lo", "ratio",
                          r"$\Phi_{LO}$", "$F_C/F_Q$", r"$\bar{n}$")


@dataclass(frozen=True)
class FigureDef:
    render: Callable[[FigureTable], "plt.Figure"]
    columns: tuple[str, ...]


FIGURES: dict[str, FigureDef] = {
    "fig2a": FigureDef(fig2a, ("g", "tau", "fq")),
    "fig2b": FigureDef(fig2b, ("g", "tau", "fq")),
    "fig2c": FigureDef(fig2c, ("q", "p", "w_pre")),
    "fig2d": FigureDef(fig2d, ("q", "p", "w_pre")),
    "fig3a": FigureDef(fig3a, ("nbar", "fq_max", "fq_limit")),
    "fig3b": FigureDef(fig3b, ("nbar", "g_max")),
    "fig4a": FigureDef(fig4a, ("q", "p", "w_pre")),
    "fig4b": FigureDef(fig4b, ("q", "p", "w_post")),
    "fig5a": FigureDef(fig5a, ("chi", "nbar", "ratio")),
    "fig5b": FigureDef(fig5b, ("chi", "nbar", "phi_star")),
    "fig5c": FigureDef(fig5c, ("nbar", "phi_lo", "ratio")),
    "fig5d": FigureDef(fig5d, ("nbar", "phi_lo", "ratio")),
}


def render(figure_id: str, table: FigureTable):
    """Validate the schema for ``figure_id`` and return the rendered figure."""
    if figure_id not in FIGURES:
        raise SchemaError(f"unknown figure id {figure_id!r}")
    definition = FIGURES[figure_id]
    table.require(definition.columns)
    return definition.render(table)


def dump_text(figure_id: str, table: FigureTable) -> str:
    """The plotted columns, bit-identical to the input file's cells."""
    if figure_id not in FIGURES:
        raise SchemaError(f"unknown figure id {figure_id!r}")
    columns = FIGURES[figure_id].columns
    table.require(columns)
    raw = [table.raw_column(name) for name in columns]
    lines = [",".join(columns)]
    lines.extend(",".join(row) for row in zip(*raw))
    return "\n".join(lines) + "\n"
