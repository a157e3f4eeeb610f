"""CLI: render fig1|fig2 --spec <path> [--out <image>]."""

import argparse
import sys

from .render import FigureSpecError, load_spec, render_fig1, render_fig2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="render",
                                 description="Render kicked-top figures from CSVs")
    sub = ap.add_subparsers(dest="figure", required=True)
    for name, func in (("fig1", render_fig1), ("fig2", render_fig2)):
        p = sub.add_parser(name)
        p.add_argument("--spec", required=True, help="JSON figure spec")
        p.add_argument("--out", help="output image path (overrides spec)")
        p.set_defaults(func=func)
    return ap


def cli_main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(load_spec(args.spec), args.out)
    except FigureSpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


def main():
    raise SystemExit(cli_main())


if __name__ == "__main__":
    main()
