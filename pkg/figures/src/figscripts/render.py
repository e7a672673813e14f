"""Panel renderers driven by a figure-spec JSON.

Spec keys:
  panel   - "heatmap" | "wigner" | "klyshko"
  input   - path of the CSV to plot
  output  - path of the image to write (.png, .pdf, ...)
  value   - heatmap only: sweep column to plot (e.g. "R", "s_min", "theta_s")
  contours - heatmap only: {column: [levels...]} overlay, default R at 0 and 1
  blank_positive_smin - heatmap only: mask cells with s_min > 0
                        (default: on for every value except "R")
  theta_s - wigner only: squeezing angle in radians; drawn as the minor axis
  title   - optional panel title

The renderer never modifies the parsed data; `RenderResult` carries a digest
of the arrays as parsed and a digest taken after plotting so callers can
verify the round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import (
    FigureSchemaError,
    digest_arrays,
    read_klyshko,
    read_sweep,
    read_wigner,
)

PANELS = ("heatmap", "wigner", "klyshko")


@dataclass
class RenderResult:
    output: Path
    panel: str
    input_digest: str
    plotted_digest: str
    extras: dict = field(default_factory=dict)

    @property
    def data_unchanged(self) -> bool:
        return self.input_digest == self.plotted_digest


def _render_heatmap(spec: dict) -> RenderResult:
    table = read_sweep(spec["input"])
    value_name = spec.get("value", "s_min")
    values = table.grid(value_name)
    smin = table.grid("s_min")
    arrays = (table.deltas, table.etas, values, smin)
    input_digest = digest_arrays(*arrays)

    blank = spec.get("blank_positive_smin", value_name != "R")
    plotted = np.ma.masked_where(smin > 0.0, values) if blank else values

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    mesh = ax.pcolormesh(table.deltas, table.etas, plotted.T, shading="nearest",
                         cmap=spec.get("cmap", "viridis"))
    fig.colorbar(mesh, ax=ax, label=value_name)

    contours = spec.get("contours", {"R": [0.0, 1.0]} if value_name == "s_min" else {})
    contour_info = {}
    for col, levels in contours.items():
        cgrid = table.grid(col)
        if np.all(np.isnan(cgrid)):
            raise FigureSchemaError(
                f"{table.path}: contour column {col!r} has no data in this sweep"
            )
        styles = ["dashed", "dashdot", "dotted"]
        colors = ["red", "black", "gray"]
        for i, level in enumerate(levels):
            try:
                cs = ax.contour(table.deltas, table.etas, cgrid.T, levels=[level],
                                colors=colors[i % 3], linestyles=styles[i % 3],
                                linewidths=1.2)
                contour_info[f"{col}={level}"] = len(cs.allsegs[0])
            except Exception:
                contour_info[f"{col}={level}"] = 0

    ax.set_xlabel("detuning / gamma")
    ax.set_ylabel("drive / gamma")
    ax.set_title(spec.get("title", value_name))
    out = Path(spec["output"])
    fig.savefig(out, dpi=spec.get("dpi", 150))
    plt.close(fig)

    mask = np.ma.getmaskarray(plotted) if blank else np.zeros_like(values, dtype=bool)
    return RenderResult(
        output=out,
        panel="heatmap",
        input_digest=input_digest,
        plotted_digest=digest_arrays(*arrays),
        extras={"mask": mask, "blank": blank, "contours": contour_info,
                "value": value_name},
    )


def _render_wigner(spec: dict) -> RenderResult:
    table = read_wigner(spec["input"])
    arrays = (table.x, table.y, table.w)
    input_digest = digest_arrays(*arrays)

    fig, ax = plt.subplots(figsize=(5.0, 4.5))
    peak = float(np.max(np.abs(table.w))) or 1.0
    mesh = ax.pcolormesh(table.x, table.y, table.w.T, shading="nearest",
                         cmap=spec.get("cmap", "RdBu_r"), vmin=-peak, vmax=peak)
    fig.colorbar(mesh, ax=ax, label="W(x, y)")

    theta_s = spec.get("theta_s")
    if theta_s is not None:
        # minor (squeezed) axis of the ellipse, drawn through the centroid
        theta = float(theta_s)
        half = 0.9 * min(np.max(np.abs(table.x)), np.max(np.abs(table.y)))
        ax.plot([-half * np.cos(theta), half * np.cos(theta)],
                [-half * np.sin(theta), half * np.sin(theta)],
                color="black", linestyle="--", linewidth=1.0)

    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title(spec.get("title", "Wigner function"))
    out = Path(spec["output"])
    fig.savefig(out, dpi=spec.get("dpi", 150))
    plt.close(fig)

    return RenderResult(
        output=out,
        panel="wigner",
        input_digest=input_digest,
        plotted_digest=digest_arrays(*arrays),
        extras={"convention": table.convention,
                "boundary_warning": table.boundary_warning,
                "theta_s": theta_s},
    )


def _render_klyshko(spec: dict) -> RenderResult:
    table = read_klyshko(spec["input"])
    arrays = (table.n, table.p, table.k)
    input_digest = digest_arrays(*arrays)

    defined = ~np.isnan(table.k)
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    ax.axhline(1.0, color="gray", linestyle="--", linewidth=1.0, label="unity")
    markerline, stemlines, baseline = ax.stem(table.n[defined], table.k[defined])
    plt.setp(markerline, markersize=5)
    plt.setp(baseline, visible=False)
    ax.set_yscale(spec.get("yscale", "log"))
    ax.set_xlabel("n")
    ax.set_ylabel("K_n")
    ax.set_title(spec.get("title", "Klyshko criterion"))
    ax.legend(loc="best")
    out = Path(spec["output"])
    fig.savefig(out, dpi=spec.get("dpi", 150))
    plt.close(fig)

    return RenderResult(
        output=out,
        panel="klyshko",
        input_digest=input_digest,
        plotted_digest=digest_arrays(*arrays),
        extras={"n_defined": int(defined.sum()), "unity_line": True},
    )


def render(spec: dict | str | Path) -> RenderResult:
    """Render one panel from a figure-spec dict or JSON file path."""
    if not isinstance(spec, dict):
        spec = json.loads(Path(spec).read_text())
    panel = spec.get("panel")
    if panel not in PANELS:
        raise FigureSchemaError(f"unknown panel type {panel!r}; expected one of {PANELS}")
    for key in ("input", "output"):
        if key not in spec:
            raise FigureSchemaError(f"figure spec is missing the {key!r} key")
    Path(spec["output"]).parent.mkdir(parents=True, exist_ok=True)
    result = {"heatmap": _render_heatmap, "wigner": _render_wigner,
              "klyshko": _render_klyshko}[panel](spec)
    if not result.data_unchanged:
        raise RuntimeError(f"renderer mutated the plotted arrays for {spec['input']}")
    return result
