"""Command line entry point: ``amflood run|oracle|verify|sweep``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import ScenarioError, event_line, header_line, read_jsonl, run
from .graph import GraphError, load_graph
from .oracle import build_layered, check_layer_structure, double_cover_to_dot, layered_to_dot
from .scenario_file import load_scenario
from .scheme import AvailabilityScheme
from .verify import run_sweep, verify_config


def _range(text: str) -> tuple:
    lo, sep, hi = text.partition("..")
    try:
        pair = (int(lo), int(hi if sep else lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A..B, got {text!r}") from None
    if pair[0] > pair[1]:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return pair


def cmd_run(args) -> int:
    config = load_scenario(args.scenario)
    config.validate()
    if not args.out:
        trace = run(config, keep_events=False)
        print(trace.outcome.summary())
        return 0
    # events are streamed so long runs never hold the whole trace in memory
    with open(args.out, "w") as out:
        out.write(header_line(config) + "\n")
        trace = run(config, sink=lambda e: out.write(event_line(e) + "\n"), keep_events=False)
        out.write(json.dumps(trace.outcome.to_record(), sort_keys=True) + "\n")
    print(trace.outcome.summary())
    return 0


def cmd_oracle(args) -> int:
    g = load_graph(Path(args.graph).read_text())
    scheme = AvailabilityScheme()
    if args.scheme:
        records = json.loads(Path(args.scheme).read_text())
        scheme = AvailabilityScheme((str(r["node"]), int(r["round"])) for r in records)
    lg = build_layered(g, args.v0, scheme, args.round)
    if args.dot:
        Path(args.dot).write_text(layered_to_dot(lg))
    if args.cover_dot:
        Path(args.cover_dot).write_text(double_cover_to_dot(lg.cover))
    report = check_layer_structure(lg)
    print(report.to_text())
    return 0 if report.passed else 1


def cmd_verify(args) -> int:
    config = load_scenario(args.scenario)
    trace = read_jsonl(Path(args.trace).read_text(), config) if args.trace else None
    report = verify_config(config, trace)
    print(report.to_text())
    return 0 if report.passed else 1


def cmd_sweep(args) -> int:
    report = run_sweep(args.n, args.f, args.count, args.seed, args.algo)
    print(report.to_text())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amflood", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate a scenario and write its JSONL trace")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle", help="build the layered oracle graph and export DOT")
    p.add_argument("--graph", required=True)
    p.add_argument("--v0", required=True)
    p.add_argument("--scheme", help="JSON list of {node, round} blocked pairs")
    p.add_argument("--round", type=int, default=1, help="broadcast round of v0")
    p.add_argument("--dot")
    p.add_argument("--cover-dot")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="run a scenario through every applicable check")
    p.add_argument("--scenario", required=True)
    p.add_argument("--trace", help="check a stored JSONL trace instead of re-running")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="verify random instances")
    p.add_argument("--n", type=_range, default=(1, 7))
    p.add_argument("--f", type=_range, default=(0, 3))
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--algo", default="synafi")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, GraphError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
