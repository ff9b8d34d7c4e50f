"""Command line entry point: `plots render --kind KIND --in CSV --out PNG`."""

import argparse
import sys

from .figures import FIGURE_KINDS, FigureSpec, render
from .io import SchemaError


def _parse_params(pairs) -> dict:
    params = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise SchemaError(f"--param expects key=value, got {pair!r}")
        key, _, value = pair.partition("=")
        params[key.strip()] = value.strip()
    return params


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plots")
    commands = parser.add_subparsers(dest="command", required=True)
    render_cmd = commands.add_parser("render", help="draw one figure from CSV input")
    render_cmd.add_argument("--kind", required=True, choices=sorted(FIGURE_KINDS))
    render_cmd.add_argument(
        "--in", dest="inputs", action="append", required=True, metavar="CSV"
    )
    render_cmd.add_argument("--out", required=True, metavar="PNG")
    render_cmd.add_argument("--param", action="append", metavar="KEY=VALUE")
    args = parser.parse_args(argv)

    try:
        spec = FigureSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            out=args.out,
            params=_parse_params(args.param),
        )
        result = render(spec)
    except SchemaError as error:
        print(f"plots render: {error}", file=sys.stderr)
        return 2
    print(f"wrote {result.path}")
    for key, value in sorted(result.annotations.items()):
        print(f"  {key} = {value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
