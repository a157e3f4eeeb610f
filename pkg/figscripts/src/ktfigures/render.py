"""Render the two figure layouts from simulator CSV files.

Consumes only the documented CSV schemas:
  time series: t,ge_su2,ge_so2,ext_x,ext_y,ext_z,fidelity
  ensemble:    t,p_su2_mean,p_su2_std
Leading `#` lines are metadata and are ignored. Rendering is deterministic:
fixed styles, no timestamps, same bytes for the same inputs.
"""

import json
import os
import warnings

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

TIMESERIES_HEADER = ("t", "ge_su2", "ge_so2", "ext_x", "ext_y", "ext_z",
                     "fidelity")
ENSEMBLE_HEADER = ("t", "p_su2_mean", "p_su2_std")

STYLE = {
    "figure.dpi": 120,
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.1,
    "legend.frameon": False,
}
CURVE_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                "#8c564b"]


class FigureSpecError(ValueError):
    """Invalid figure spec or CSV that does not match the schema."""


def read_series(path: str, expected_header: tuple) -> dict:
    if not os.path.exists(path):
        raise FigureSpecError(f"{path}: file not found")
    header, rows = None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = tuple(line.split(","))
                continue
            rows.append(line.split(","))
    if header is None:
        raise FigureSpecError(f"{path}: empty CSV, no header line")
    if header != expected_header:
        raise FigureSpecError(
            f"{path}: header {header} does not match expected {expected_header}")
    if not rows:
        raise FigureSpecError(f"{path}: no data rows")
    cols = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in rows]
        cols[name] = (None if all(v == "" for v in vals)
                      else np.array([float(v) if v else np.nan for v in vals]))
    return cols


def load_spec(path: str) -> dict:
    """Load a JSON figure spec; relative CSV/output paths are taken
    relative to the spec file's directory."""
    try:
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
    except FileNotFoundError:
        raise FigureSpecError(f"spec file not found: {path}")
    except json.JSONDecodeError as e:
        raise FigureSpecError(f"spec file {path} is not valid JSON: {e}")
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    if isinstance(spec.get("regimes"), dict):
        spec["regimes"] = {k: resolve(v) for k, v in spec["regimes"].items()}
    if isinstance(spec.get("ensemble"), str):
        spec["ensemble"] = resolve(spec["ensemble"])
    if isinstance(spec.get("series"), list):
        spec["series"] = [resolve(p) for p in spec["series"]]
    if isinstance(spec.get("output"), str):
        spec["output"] = resolve(spec["output"])
    return spec


def _fit_decay_coefficient(t: np.ndarray, P: np.ndarray) -> float:
    """Constrained log-space fit of P ~ exp(-a t^2) over the P > 0.05 window."""
    mask = P > 0.05
    tw, logP = t[mask], np.log(P[mask])
    denom = np.sum(tw ** 4)
    if denom == 0:
        return 0.0
    return max(float(-np.sum(tw ** 2 * logP) / denom), 0.0)


def render_fig1(spec: dict, out: str | None = None) -> str:
    """Main panel: GE vs time for the three regime runs. Inset: ensemble mean
    purity with the fitted Gaussian dashed overlay."""
    for key in ("regimes", "ensemble"):
        if key not in spec:
            raise FigureSpecError(f"fig1 spec missing key: {key}")
    out = out or spec.get("output")
    if not out:
        raise FigureSpecError("no output image path given (spec key 'output' or --out)")
    regimes = {name: read_series(path, TIMESERIES_HEADER)
               for name, path in spec["regimes"].items()}
    ensemble = read_series(spec["ensemble"], ENSEMBLE_HEADER)

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.2, 3.6))
        for color, (name, cols) in zip(CURVE_COLORS, regimes.items()):
            ax.plot(cols["t"], cols["ge_su2"], color=color, label=name)
        ax.set_xlabel("kick number $t$")
        ax.set_ylabel(r"GE$_{\mathfrak{su}(2)}$")
        ax.set_ylim(-0.02, 1.05)
        ax.legend(loc="center right")

        inset = ax.inset_axes([0.44, 0.25, 0.32, 0.38])
        t, P = ensemble["t"], ensemble["p_su2_mean"]
        a = spec.get("fit_a")
        if a is None:
            a = _fit_decay_coefficient(t, P)
        tmax = min(12, int(t.max()))
        inset.plot(t[:tmax + 1], P[:tmax + 1], color="#1f77b4",
                   label="ensemble mean")
        tt = np.linspace(0, tmax, 200)
        inset.plot(tt, np.exp(-a * tt ** 2), "--", color="black",
                   label=rf"$e^{{-{a:.2f}t^2}}$")
        inset.set_xlabel("$t$", labelpad=1)
        inset.set_ylabel(r"$\langle P_{\mathfrak{su}(2)}\rangle$", labelpad=1)
        inset.tick_params(labelsize=7)
        inset.legend(fontsize=6, loc="upper right")
        fig.tight_layout()
        fig.savefig(out, metadata={"Software": "ktfigures"})
        plt.close(fig)
    return out


def render_fig2(spec: dict, out: str | None = None) -> str:
    """Stacked panels: GE (top) and z-extent (bottom) for each input series,
    one color per series shared across panels."""
    if "series" not in spec or not spec["series"]:
        raise FigureSpecError("fig2 spec missing non-empty key: series")
    out = out or spec.get("output")
    if not out:
        raise FigureSpecError("no output image path given (spec key 'output' or --out)")
    paths = list(spec["series"])
    if len(paths) == 1:
        warnings.warn("fig2 spec lists a single CSV; rendering one curve per panel")
    loaded = [(path, read_series(path, TIMESERIES_HEADER)) for path in paths]
    shortest = min(len(cols["t"]) for _, cols in loaded)
    if any(len(cols["t"]) != shortest for _, cols in loaded):
        warnings.warn(f"row counts differ across CSVs; truncating to {shortest} rows")

    labels = spec.get("labels") or [os.path.splitext(os.path.basename(p))[0]
                                    for p in paths]
    with plt.rc_context(STYLE):
        fig, (ax_ge, ax_ext) = plt.subplots(2, 1, figsize=(5.2, 5.2),
                                            sharex=True)
        for i, (path, cols) in enumerate(loaded):
            color = CURVE_COLORS[i % len(CURVE_COLORS)]
            label = labels[i] if i < len(labels) else path
            ax_ge.plot(cols["t"][:shortest], cols["ge_su2"][:shortest],
                       color=color, label=label)
            ax_ext.plot(cols["t"][:shortest], cols["ext_z"][:shortest],
                        color=color)
        ax_ge.set_ylabel(r"GE$_{\mathfrak{su}(2)}$")
        ax_ge.legend(fontsize=7, loc="center right")
        ax_ge.set_title("(a)", loc="left", fontsize=9)
        ax_ext.set_ylabel(r"$\Delta J_z$")
        ax_ext.set_xlabel("kick number $t$")
        ax_ext.set_title("(b)", loc="left", fontsize=9)
        fig.tight_layout()
        fig.savefig(out, metadata={"Software": "ktfigures"})
        plt.close(fig)
    return out
