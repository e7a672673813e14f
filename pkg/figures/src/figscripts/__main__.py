"""Entry point: render panels from one or more figure-spec JSON files."""

from __future__ import annotations

import argparse
import sys

from .render import render
from .schema import FigureSchemaError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="hyperrad-figures",
        description="Render heatmap/wigner/klyshko panels from documented CSV outputs.",
    )
    parser.add_argument("specs", nargs="+", help="figure-spec JSON file(s)")
    args = parser.parse_args(argv)
    for spec_path in args.specs:
        try:
            result = render(spec_path)
        except FigureSchemaError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {result.output} ({result.panel}, data digest {result.input_digest[:12]})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
