"""Command-line entry: render one or all figure kinds from a manifest."""

from __future__ import annotations

import argparse
import sys

from .render import FIGURE_KINDS, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vskinetic-figures",
        description="Regenerate study figures from a solver run manifest.",
    )
    parser.add_argument("--manifest", required=True, help="path to manifest.json")
    parser.add_argument(
        "--figure",
        required=True,
        choices=FIGURE_KINDS + ("all",),
        help="figure kind to render",
    )
    parser.add_argument("--out", default=None, help="output directory (default: manifest dir)")
    args = parser.parse_args(argv)

    kinds = FIGURE_KINDS if args.figure == "all" else (args.figure,)
    try:
        for kind in kinds:
            path, _ = render(args.manifest, kind, args.out)
            print(f"wrote {path}")
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
