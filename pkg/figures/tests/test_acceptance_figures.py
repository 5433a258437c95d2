"""Acceptance gate for the figures component.

Renders from artifacts produced by the actual skewmf driver (not
synthetic fixtures) and checks the qualitative structure of the
critical-set diagram plus exact agreement of slope annotations with the
data.  One [ACCEPT] line per criterion.
"""

import time

import numpy as np
import pytest

import skewmf.cli
import skewmf_figures as sf
from skewmf_figures.reference import fit_slope


def report(name, ok, detail, t0):
    t = time.time() - t0
    print(f"[ACCEPT] {name}: {'PASS' if ok else 'FAIL'} ({detail}, {t:.1f}s)")
    assert ok, f"{name}: {detail}"


def test_lambda_diagram_structure(tmp_path):
    t0 = time.time()
    src = tmp_path / "src"
    rc = skewmf.cli.main(["lambda-map", "--rho-min", str(np.pi),
                          "--rho-max", str(40 * np.pi), "--density", "70",
                          "--out", str(src)])
    assert rc == 0
    out = tmp_path / "lambda.png"
    s = sf.render(sf.FigureJob("LambdaMap", [str(src / "lambda_map.csv")],
                               str(out)))

    # curve family: without vortices the admissible n are the positive
    # integers, each curve passes through (8*pi*n, 8*pi*n) on the
    # diagonal and has asymptotes rho_i = 4*pi*n
    ns = s["n_values"]
    integers = all(float(n).is_integer() and n >= 1 for n in ns)
    diag = all(
        abs(sf.hyperbola(n, np.array([8 * np.pi * n]))[0] - 8 * np.pi * n)
        < 1e-9 for n in ns)
    asym = all(np.isnan(sf.hyperbola(n, np.array([4 * np.pi * n]))[0])
               and sf.hyperbola(n, np.array([4 * np.pi * n * (1 + 1e-8)]))[0]
               > 1e8 for n in ns)

    # every sample the driver marked critical sits on one of the curves
    # the figure draws, and vice versa nothing in an open region does
    d = sf.read_lambda_map_csv(src / "lambda_map.csv")
    on = d["status"] == "in_lambda"
    q4 = d["q_over_4pi"]
    dist = np.min(np.abs(q4[:, None] - np.array(ns)[None, :]), axis=1)
    agree = on.any() and (dist[on] < 0.15 / (4 * np.pi) + 1e-9).all() \
        and (dist[d["k"] >= 0] > 0).all()

    png = out.exists() and out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    report("figures-lambda-diagram",
           integers and diag and asym and agree and png,
           f"{len(ns)} curves, diagonal/asymptote checks {diag}/{asym}, "
           f"{int(on.sum())} critical samples on curves", t0)


def test_slope_annotations_match_csv_exactly(tmp_path):
    t0 = time.time()
    src = tmp_path / "src"
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"surface_kind": "sphere", "resolution": 48}')
    rc = skewmf.cli.main(["asymptotics", "--k", "1",
                          "--lambda-list", "10,14,20,28,40",
                          "--config", str(cfg), "--out", str(src)])
    assert rc == 0
    path = src / "asymptotics_k1.csv"
    out = tmp_path / "slopes.png"
    s = sf.render(sf.FigureJob("AsymptoticSlopes", [str(path)], str(out)))
    fit = s["fits"][0]

    # the annotated slope is bitwise the least-squares fit of the CSV
    # columns, which is itself the fit the driver reports
    d = sf.read_asymptotics_csv(path)
    exact_hd = fit["s_half_dirichlet"] == fit_slope(d["lambda"],
                                                    d["half_dirichlet"])
    exact_lm = fit["s_log_mass"] == fit_slope(d["lambda"], d["log_mass"])
    dev_consistent = fit["dev_half_dirichlet_pct"] == 100.0 * (
        fit["s_half_dirichlet"] / (16 * np.pi) - 1.0)
    sane = abs(fit["dev_half_dirichlet_pct"]) < 10.0
    png = out.exists() and out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    report("figures-slope-annotations",
           exact_hd and exact_lm and dev_consistent and sane and png,
           f"slope {fit['s_half_dirichlet']:.4f} vs 16pi="
           f"{16 * np.pi:.4f} ({fit['dev_half_dirichlet_pct']:+.2f}%), "
           f"exact match {exact_hd and exact_lm}", t0)


def test_rendering_is_read_only(tmp_path, write_lcsf):
    t0 = time.time()
    rng = np.random.default_rng(5)
    v = rng.standard_normal((8, 8))
    p = write_lcsf(v)
    before = p.read_bytes()
    sf.render(sf.FigureJob("FieldHeatmap", [str(p)], str(tmp_path / "h.png")))
    ok = p.read_bytes() == before
    report("figures-read-only", ok, "input bytes unchanged after render", t0)
