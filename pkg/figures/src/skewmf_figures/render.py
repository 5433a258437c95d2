"""Batch figure rendering.

A FigureJob names a kind, its input artifacts, and an output image.
render() dispatches, writes the image, and returns a small summary dict
(fitted slopes, curve parameters, ...) so callers and tests can check
the annotated numbers without parsing the image back.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .io import (FigureInputError, read_asymptotics_csv, read_field,
                 read_field_csv, read_lambda_map_csv, read_mtcheck_csv)
from .reference import (critical_n_values, fit_slope, hyperbola, mt_reference,
                        slope_references)

KINDS = ("LambdaMap", "AsymptoticSlopes", "MTSaturation", "FieldHeatmap")


@dataclass
class FigureJob:
    kind: str
    inputs: list
    output: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureInputError(f"unknown figure kind {self.kind!r}; "
                                   f"expected one of {KINDS}")
        if not self.inputs:
            raise FigureInputError("job has no inputs")

    @classmethod
    def load(cls, path):
        path = Path(path)
        if not path.exists():
            raise FigureInputError(f"{path}: no such job file")
        try:
            d = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise FigureInputError(f"{path}: invalid JSON ({exc})") from exc
        unknown = set(d) - {"kind", "inputs", "output", "options"}
        if unknown:
            raise FigureInputError(f"{path}: unknown job keys {sorted(unknown)}")
        try:
            return cls(kind=d["kind"], inputs=list(d["inputs"]),
                       output=d["output"], options=dict(d.get("options", {})))
        except KeyError as exc:
            raise FigureInputError(f"{path}: missing job key {exc}") from exc


def _save(fig, job):
    out = Path(job.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=job.options.get("dpi", 150), bbox_inches="tight")
    plt.close(fig)
    return str(out)


def _render_lambda_map(job):
    data = read_lambda_map_csv(job.inputs[0])
    r1s = np.unique(data["rho1"])
    r2s = np.unique(data["rho2"])
    n1, n2 = len(r1s), len(r2s)
    if n1 * n2 != len(data["rho1"]):
        raise FigureInputError(f"{job.inputs[0]}: samples do not form a grid")
    k_grid = data["k"].reshape(n1, n2)

    alphas = tuple(job.options.get("alphas", ()))
    hi = max(r1s[-1], r2s[-1])
    ns = critical_n_values(alphas, bound_over_4pi=hi / (4.0 * np.pi))

    fig, ax = plt.subplots(figsize=(6.4, 6.0))
    # region-k shading behind the curves; unresolved samples (on or too
    # near a curve) are masked out
    shade = np.ma.masked_where(k_grid < 0, k_grid).T
    mesh = ax.pcolormesh(r1s / np.pi, r2s / np.pi, shade, cmap="Blues",
                         shading="nearest", alpha=0.55,
                         vmin=0, vmax=max(1, shade.max()))
    fig.colorbar(mesh, ax=ax, label="region index k", shrink=0.8)

    dense = np.linspace(r1s[0], hi, 600)
    for n in ns:
        c = 4.0 * np.pi * n
        if c >= hi:
            continue
        ax.plot(dense / np.pi, hyperbola(n, dense) / np.pi, "k-", lw=1.2)
        ax.axvline(c / np.pi, color="0.6", ls=":", lw=0.8)
        ax.axhline(c / np.pi, color="0.6", ls=":", lw=0.8)
        if 2 * c < hi:
            ax.annotate(f"n={n:g}", (8 * n, 8 * n),
                        textcoords="offset points", xytext=(4, 4), fontsize=8)
    ax.set_xlim(r1s[0] / np.pi, hi / np.pi)
    ax.set_ylim(r2s[0] / np.pi, hi / np.pi)
    ax.set_xlabel(r"$\rho_1 / \pi$")
    ax.set_ylabel(r"$\rho_2 / \pi$")
    ax.set_title(job.options.get(
        "title", r"critical set $\rho_1\rho_2/(\rho_1{+}\rho_2) = 4\pi n$"))
    path = _save(fig, job)
    return {"output": path, "n_values": ns,
            "diagonal_points": [(8.0 * np.pi * n, 8.0 * np.pi * n) for n in ns],
            "samples": int(n1 * n2)}


def _infer_k(path, options):
    if "k" in options:
        return int(options["k"])
    m = re.search(r"_k(\d+)\.csv$", str(path))
    if m:
        return int(m.group(1))
    raise FigureInputError(f"cannot infer bubble count k from {path}; "
                           f"pass it in options")


def _render_asymptotic_slopes(job):
    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    summary = {"fits": []}
    for path in job.inputs:
        k = _infer_k(path, job.options)
        data = read_asymptotics_csv(path)
        lam = data["lambda"]
        s_half = fit_slope(lam, data["half_dirichlet"])
        s_mass = fit_slope(lam, data["log_mass"])
        ref_half, ref_full, ref_mass = slope_references(k)
        dev_half = 100.0 * (s_half / ref_half - 1.0)
        dev_mass = 100.0 * (s_mass / ref_mass - 1.0)

        x = np.log(lam)
        line, = ax.plot(x, data["half_dirichlet"], "o",
                        label=(f"k={k}: slope {s_half:.2f} vs $16k\\pi$="
                               f"{ref_half:.2f} ({dev_half:+.2f}%)"))
        # fitted line and the reference-slope guide anchored at the first point
        ax.plot(x, data["half_dirichlet"][0] + s_half * (x - x[0]), "-",
                color=line.get_color(), lw=1)
        ax.plot(x, data["half_dirichlet"][0] + ref_half * (x - x[0]), "--",
                color=line.get_color(), lw=1, alpha=0.6)
        summary["fits"].append({
            "input": str(path), "k": k,
            "s_half_dirichlet": s_half, "s_full_dirichlet": 2.0 * s_half,
            "s_log_mass": s_mass,
            "ref_half_dirichlet": ref_half, "ref_full_dirichlet": ref_full,
            "ref_log_mass": ref_mass,
            "dev_half_dirichlet_pct": dev_half, "dev_log_mass_pct": dev_mass,
        })
    last = summary["fits"][-1]
    ax.set_xlabel(r"$\log \lambda$")
    ax.set_ylabel(r"$\frac{1}{2}\int |\nabla \varphi_\lambda|^2$")
    ax.set_title(job.options.get("title", "bubble energy growth"))
    ax.text(0.02, 0.98,
            f"log-mass slope {last['s_log_mass']:.4f} vs 2 "
            f"({last['dev_log_mass_pct']:+.2f}%)",
            transform=ax.transAxes, va="top", fontsize=9)
    ax.legend(loc="lower right", fontsize=8)
    summary["output"] = _save(fig, job)
    return summary


def _render_mt_saturation(job):
    data = read_mtcheck_csv(job.inputs[0])
    fig, ax = plt.subplots(figsize=(6.4, 4.6))
    summary = {"families": []}
    for l in np.unique(data["l"]):
        sel = data["l"] == l
        lam, ratio = data["lambda"][sel], data["ratio"][sel]
        ref = mt_reference(int(l))
        line, = ax.semilogx(lam, ratio, "o-", label=f"l={l}")
        ax.axhline(ref, color=line.get_color(), ls="--", lw=1, alpha=0.7)
        ax.annotate(f"$1/(8\\cdot{l}\\pi)$", (lam[0], ref),
                    textcoords="offset points", xytext=(2, 3), fontsize=8,
                    color=line.get_color())
        stored_ref = data["reference"][sel]
        if not np.allclose(stored_ref, ref, rtol=0, atol=1e-12):
            raise FigureInputError(
                f"{job.inputs[0]}: stored reference for l={l} disagrees with "
                f"1/(8*l*pi) = {ref!r}")
        summary["families"].append({
            "l": int(l), "final_ratio": float(ratio[-1]), "reference": ref,
            "final_over_reference": float(ratio[-1] / ref)})
    ax.set_xlabel(r"$\lambda$")
    ax.set_ylabel(r"$2\log\int \hat h e^{F} \,/\, \int |\nabla F|^2$")
    ax.set_title(job.options.get("title", "inequality saturation"))
    ax.legend(fontsize=8)
    summary["output"] = _save(fig, job)
    return summary


def _render_field_heatmap(job):
    path = Path(job.inputs[0])
    dump = read_field(path) if path.suffix == ".lcsf" else read_field_csv(path)
    c1, c2 = dump.coords
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    mesh = ax.pcolormesh(c2, c1, dump.values, cmap=job.options.get("cmap", "RdBu_r"),
                         shading="nearest")
    fig.colorbar(mesh, ax=ax, label=job.options.get("label", "value"))
    if dump.kind == "torus":
        ax.set_xlabel("y")
        ax.set_ylabel("x")
        ax.set_aspect("equal")
    else:
        ax.set_xlabel(r"$\varphi$")
        ax.set_ylabel(r"$\theta$")
        ax.invert_yaxis()
    ax.set_title(job.options.get("title", path.stem))
    return {"output": _save(fig, job), "kind": dump.kind,
            "shape": list(dump.values.shape),
            "min": float(dump.values.min()), "max": float(dump.values.max())}


_RENDERERS = {
    "LambdaMap": _render_lambda_map,
    "AsymptoticSlopes": _render_asymptotic_slopes,
    "MTSaturation": _render_mt_saturation,
    "FieldHeatmap": _render_field_heatmap,
}


def render(job: FigureJob) -> dict:
    summary = _RENDERERS[job.kind](job)
    summary["kind"] = job.kind
    return summary
