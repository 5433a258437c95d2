"""Experiment drivers and data export.

Subcommands: solve, sweep, asymptotics, mtcheck, verify, lambda-map.
Runs are deterministic given the config and seed; CSV and binary field
dumps are the only interchange with the figures component.  Exit codes:
0 all declared contracts pass, 1 numerical failure, 2 configuration
error.  SKEWMF_OUT sets the default output root.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bubbles import Barycenter, energy_asymptotics, mt_check, bubble_field, BubbleParams
from .config import RunConfig
from .errors import ConfigurationError, SkewMFError
from .fieldio import dump_field, export_csv, load_field
from .functionals import J_tilde
from .problem import (EIGHT_PI, enumerate_sigma, lambda_membership)
from .solver import (continuation, find_k1_solution, minimize_outer, newton_el,
                     residual)
from .surface import Field, SurfaceKind, build_grid

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2


def _out_dir(arg):
    root = arg or os.environ.get("SKEWMF_OUT", "out")
    p = Path(root)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _dump_report(pd, rep, out: Path, tag="", config=None):
    grid = pd.grid
    prefix = f"{tag}_" if tag else ""
    for name in ("u1", "u2", "F", "G"):
        f = Field(grid, getattr(rep, name))
        dump_field(f, out / f"{prefix}{name}.lcsf")
        export_csv(f, out / f"{prefix}{name}.csv")
    report = {
        "method": rep.method,
        "success": bool(rep.success),
        "message": rep.message,
        "rho": list(rep.rho),
        "residual_1": rep.residual_1,
        "residual_2": rep.residual_2,
        "j_tilde_value": None if np.isnan(rep.j_tilde_value) else rep.j_tilde_value,
        "surface": {"kind": grid.kind.value, "resolution": list(grid.shape)},
        "iterations": len(rep.trace),
    }
    if config is not None:
        report["config"] = json.loads(config.to_json())
    with open(out / f"{prefix}report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    return report


def cmd_solve(args):
    cfg = RunConfig.load(args.config)
    if args.seed is not None:
        cfg.rng_seed = args.seed
    out = _out_dir(args.out or cfg.out)
    pd = cfg.build_problem()
    member = lambda_membership(cfg.rho, pd.alphas)
    if member.in_lambda:
        print(f"error: rho={cfg.rho} lies in the critical set "
              f"(rho1*rho2/(rho1+rho2) = 4*pi*{member.nearest_n})", file=sys.stderr)
        return EXIT_CONFIG
    rng = np.random.default_rng(cfg.rng_seed)
    grid = pd.grid
    if cfg.method == "minimize":
        F0 = grid.project_mean_zero(0.1 * rng.standard_normal(grid.shape))
        rep = minimize_outer(pd, F0)
    elif cfg.method == "newton":
        u0 = grid.project_mean_zero(0.1 * rng.standard_normal(grid.shape))
        v0 = grid.project_mean_zero(0.1 * rng.standard_normal(grid.shape))
        rep = newton_el(pd, u0, v0)
    elif cfg.method == "continuation":
        reps = continuation(pd, cfg.rho_path or [cfg.rho])
        rep = reps[-1]
        with open(out / "branch.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rho1", "rho2", "residual_1", "residual_2", "j_tilde"])
            for r in reps:
                w.writerow([r.rho[0], r.rho[1], r.residual_1, r.residual_2,
                            r.j_tilde_value])
    elif cfg.method == "find_k1":
        rep = find_k1_solution(pd, seed=cfg.rng_seed)
    else:
        print(f"error: unknown method {cfg.method!r}", file=sys.stderr)
        return EXIT_CONFIG
    report = _dump_report(pd, rep, out, config=cfg)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK if rep.success else EXIT_NUMERICAL


def _parse_grid_spec(spec):
    lo, hi, n = spec.split(":")
    return np.linspace(float(lo), float(hi), int(n))


def cmd_sweep(args):
    cfg = RunConfig.load(args.config)
    out = _out_dir(args.out or cfg.out)
    r1s_spec, r2s_spec = args.rho_grid.split(",")
    r1s, r2s = _parse_grid_spec(r1s_spec), _parse_grid_spec(r2s_spec)
    pd0 = cfg.build_problem()
    ok = True
    rows = []
    for r1 in r1s:
        for r2 in r2s:
            member = lambda_membership((r1, r2), pd0.alphas)
            if member.in_lambda:
                rows.append([r1, r2, "in_lambda", "", ""])
                continue
            pd = pd0.with_rho((r1, r2))
            try:
                rep = newton_el(pd)
                rows.append([r1, r2, "ok", rep.max_residual, rep.j_tilde_value])
                ok = ok and rep.success
            except SkewMFError as exc:
                rows.append([r1, r2, "failed", "", str(exc)])
                ok = False
    with open(out / "sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rho1", "rho2", "status", "max_residual", "j_tilde"])
        w.writerows(rows)
    print(f"sweep: {len(rows)} points -> {out / 'sweep.csv'}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_asymptotics(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig(
        surface_kind="sphere", resolution=(96, 192))
    out = _out_dir(args.out)
    pd = cfg.build_problem()
    grid = pd.grid
    lambdas = [float(x) for x in args.lambda_list.split(",")]
    rng = np.random.default_rng(cfg.rng_seed)
    pts = grid.node_points().reshape(-1, 2)
    atoms = [(1.0 / args.k, tuple(pts[rng.integers(len(pts))])) for _ in range(args.k)]
    sigma = Barycenter.normalized(atoms)
    rep = energy_asymptotics(grid, sigma, lambdas, log_hat_h=pd.log_hat_h,
                             vortices=pd.vortices)
    path = out / f"asymptotics_k{args.k}.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "half_dirichlet", "log_mass", "j_tilde"])
        for lam, hd, lm in zip(rep.lambdas, rep.half_dirichlet, rep.log_mass):
            phi = bubble_field(grid, BubbleParams(lam, sigma))
            jt = J_tilde(pd, phi.values) if args.with_j_tilde else ""
            w.writerow([lam, hd, lm, jt])
    print(f"k={args.k}: slope(dirichlet/2)={rep.s_dirichlet:.4f} "
          f"(target {16 * args.k * np.pi:.4f}), slope(log mass)={rep.s_logint:.4f} "
          f"(target 2) -> {path}")
    target = 16.0 * args.k * np.pi
    ok = abs(rep.s_dirichlet / target - 1.0) < 0.1 and abs(rep.s_logint / 2.0 - 1.0) < 0.1
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_mtcheck(args):
    cfg = RunConfig.load(args.config) if args.config else RunConfig(
        surface_kind="sphere", resolution=(96, 192))
    out = _out_dir(args.out)
    pd = cfg.build_problem()
    grid = pd.grid
    lambdas = [float(x) for x in args.lambda_list.split(",")]
    rows = []
    ok = True
    for l_bubbles in (1, 2):
        pts = grid.node_points().reshape(-1, 2)
        idx = np.linspace(0, len(pts) - 1, l_bubbles + 2, dtype=int)[1:-1]
        atoms = [(1.0 / l_bubbles, tuple(pts[i])) for i in idx]
        sigma = Barycenter.normalized(atoms)
        fields = [bubble_field(grid, BubbleParams(lam, sigma)).values for lam in lambdas]
        rep = mt_check(grid, pd.log_hat_h, fields)
        for lam, ratio, deficit in zip(lambdas, rep.ratios, rep.deficits):
            rows.append([l_bubbles, lam, ratio, 1.0 / (8.0 * l_bubbles * np.pi), deficit])
        final = rep.ratios[-1] * 8.0 * l_bubbles * np.pi
        ok = ok and abs(final - 1.0) < 0.05
        print(f"l={l_bubbles}: final ratio*8*l*pi = {final:.4f}")
    path = out / "mtcheck.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["l", "lambda", "ratio", "reference", "deficit"])
        w.writerows(rows)
    print(f"-> {path}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_verify(args):
    d = Path(args.fields)
    reports = sorted(d.glob("*report.json"))
    if not reports:
        print(f"error: no report.json under {d}", file=sys.stderr)
        return EXIT_CONFIG
    ok = True
    for rp in reports:
        with open(rp) as fh:
            rec = json.load(fh)
        prefix = rp.name[:-len("report.json")]
        u1 = load_field(d / f"{prefix}u1.lcsf")
        u2 = load_field(d / f"{prefix}u2.lcsf", grid=u1.grid)
        if not rec.get("config"):
            print(f"{rp.name}: no embedded config, cannot recompute", file=sys.stderr)
            ok = False
            continue
        pd = RunConfig.from_json(json.dumps(rec["config"])).build_problem(u1.grid)
        pd = pd.with_rho(rec["rho"])
        r1, r2 = residual(pd, u1.values, u2.values)
        match = (abs(r1 - rec["residual_1"]) <= 1e-12 + 1e-9 * abs(rec["residual_1"])
                 and abs(r2 - rec["residual_2"]) <= 1e-12 + 1e-9 * abs(rec["residual_2"]))
        passes = rec["success"] and match
        print(f"{rp.name}: recomputed residuals ({r1:.3e}, {r2:.3e}) "
              f"stored ({rec['residual_1']:.3e}, {rec['residual_2']:.3e}) "
              f"{'OK' if passes else 'FAIL'}")
        ok = ok and passes
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_lambda_map(args):
    out = _out_dir(args.out)
    alphas = [float(a) for a in args.alphas.split(",")] if args.alphas else []
    lo, hi = args.rho_min, args.rho_max
    if not (0 < lo < hi <= 40 * np.pi + 1e-9):
        print("error: window must lie in (0, 40*pi]", file=sys.stderr)
        return EXIT_CONFIG
    rs = np.linspace(lo, hi, args.density)
    path = Path(out) / "lambda_map.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rho1", "rho2", "status", "k", "q_over_4pi", "nearest_n"])
        for r1 in rs:
            for r2 in rs:
                m = lambda_membership((r1, r2), alphas, tol=args.tol)
                w.writerow([r1, r2, m.status, "" if m.k is None else m.k,
                            m.q / (4.0 * np.pi), m.nearest_n])
    ns = enumerate_sigma(alphas, 2 * hi)
    print(f"lambda-map: {len(rs)**2} samples, n-values {ns[:8]}... -> {path}")
    return EXIT_OK


def main(argv=None):
    ap = argparse.ArgumentParser(prog="skewmf", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run one solve from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve over a grid of rho values")
    p.add_argument("--config", required=True)
    p.add_argument("--rho-grid", required=True,
                   help="r1min:r1max:n,r2min:r2max:n")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("asymptotics", help="bubble energy growth fits")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--lambda-list", default="20,40,80,160")
    p.add_argument("--config")
    p.add_argument("--with-j-tilde", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("mtcheck", help="exponential-integral inequality saturation")
    p.add_argument("--lambda-list", default="20,40,80,160")
    p.add_argument("--config")
    p.add_argument("--out")
    p.set_defaults(func=cmd_mtcheck)

    p = sub.add_parser("verify", help="recompute residuals from dumped fields")
    p.add_argument("--fields", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lambda-map", help="map the critical parameter set")
    p.add_argument("--rho-min", type=float, default=0.5 * np.pi)
    p.add_argument("--rho-max", type=float, default=40.0 * np.pi)
    p.add_argument("--density", type=int, default=80)
    p.add_argument("--alphas", default="")
    p.add_argument("--tol", type=float, default=0.15)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lambda_map)

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SkewMFError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
