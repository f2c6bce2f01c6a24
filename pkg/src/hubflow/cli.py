"""Command line interface: run the batch pipeline, serve a workspace,
or generate a synthetic scenario."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .datagen import load_scenario, write_scenario
from .pipeline import PipelineInputError, pipeline_run


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hubflow",
        description="Transportation-hub analytics pipeline and query service.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the batch pipeline over a config file")
    run_p.add_argument("config", help="pipeline config JSON")
    run_p.add_argument("--workspace", help="output directory (overrides config)")
    run_p.add_argument("--force", action="store_true", help="recompute even if the bundle is current")

    serve_p = sub.add_parser("serve", help="serve a computed workspace over HTTP")
    serve_p.add_argument("workspace", help="workspace directory written by 'run'")
    serve_p.add_argument("--bind", default="127.0.0.1:8000", help="host:port (default %(default)s)")

    gen_p = sub.add_parser("gen", help="generate a synthetic scenario")
    gen_p.add_argument("scenario", help="scenario config JSON")
    gen_p.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )

    if args.command == "run":
        try:
            bundle = pipeline_run(args.config, workspace=args.workspace, force=args.force)
        except PipelineInputError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        counts = bundle.manifest["counts"]
        print(f"workspace: {bundle.workspace}")
        print(f"config hash: {bundle.config_hash}")
        for key in ("records", "rejects", "tracks", "trips", "hub_events"):
            print(f"{key}: {counts[key]}")
        return 0

    if args.command == "serve":
        from .server import serve

        try:
            serve(args.workspace, bind=args.bind)
        except PipelineInputError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
        return 0

    if args.command == "gen":
        try:
            config = load_scenario(args.scenario)
        except FileNotFoundError:
            print(f"error: scenario file not found: {args.scenario}", file=sys.stderr)
            return 2
        except (json.JSONDecodeError, ValueError, KeyError) as err:
            print(f"error: bad scenario config: {err}", file=sys.stderr)
            return 2
        paths = write_scenario(config, args.out)
        for name, path in sorted(paths.items()):
            print(f"{name}: {path}")
        return 0

    return 2  # unreachable with required=True


if __name__ == "__main__":
    sys.exit(main())
