"""Command-line entry point.

Either `render --job job.json` with a JSON job description, or one
per-kind subcommand taking input artifacts directly.  Exit codes: 0 on
success, 1 on missing/corrupt input, 2 on bad usage.
"""

from __future__ import annotations

import argparse
import json
import sys

from .render import KINDS, FigureJob, render

EXIT_OK, EXIT_INPUT, EXIT_USAGE = 0, 1, 2


def _run(job):
    summary = render(job)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_render(args):
    return _run(FigureJob.load(args.job))


def cmd_kind(kind, args):
    options = json.loads(args.options) if args.options else {}
    if getattr(args, "k", None) is not None:
        options["k"] = args.k
    if getattr(args, "title", None):
        options["title"] = args.title
    if getattr(args, "alphas", None):
        options["alphas"] = [float(a) for a in args.alphas.split(",")]
    return _run(FigureJob(kind=kind, inputs=args.inputs, output=args.out,
                          options=options))


def main(argv=None):
    ap = argparse.ArgumentParser(prog="skewmf-figures", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a figure from a JSON job file")
    p.add_argument("--job", required=True)
    p.set_defaults(func=cmd_render)

    flags = {
        "LambdaMap": ("lambda-map", ("alphas", "title")),
        "AsymptoticSlopes": ("slopes", ("k", "title")),
        "MTSaturation": ("mt-saturation", ("title",)),
        "FieldHeatmap": ("heatmap", ("title",)),
    }
    for kind in KINDS:
        name, extra = flags[kind]
        p = sub.add_parser(name, help=f"render a {kind} figure")
        p.add_argument("inputs", nargs="+", help="input CSV / .lcsf paths")
        p.add_argument("--out", required=True, help="output image path")
        p.add_argument("--options", help="extra styling options as JSON")
        if "k" in extra:
            p.add_argument("--k", type=int)
        if "alphas" in extra:
            p.add_argument("--alphas", default="")
        if "title" in extra:
            p.add_argument("--title")
        p.set_defaults(func=lambda args, kind=kind: cmd_kind(kind, args))

    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"usage error: bad JSON options ({exc})", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
