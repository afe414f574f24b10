"""Command-line entry point: ``chemenum enumerate|oracle|instance``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .features import PathSpec, SpecError, format_spec, parse_spec
from .graph import DEFAULT_COLORS, ColorTable, GraphError, ShapeClass, parse_formula, parse_graphs, write_graphs
from .pipeline import (
    EXIT_NO_SOLUTIONS, EXIT_OK, EXIT_USAGE, STAGES, RunConfig, build_instance, format_stats, run,
)

_STAGE_CHOICES = ("tree", "mono", "biblock", "all")


def _stages(stage: str, has_input: bool) -> tuple[str, ...]:
    if stage == "all":
        return STAGES
    if has_input:
        # input graphs belong to the stage before the requested one
        i = STAGES.index(stage)
        if i == 0:
            raise ValueError("the tree stage takes no input graphs")
        return (stage,)
    return STAGES[:STAGES.index(stage) + 1]


def _read_graphs(path: str, table: ColorTable, d: int):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return [g for _, g in parse_graphs(text, table, d)]


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _cmd_enumerate(args) -> int:
    spec = parse_spec(Path(args.spec).read_text(encoding="utf-8"))
    stages = _stages(args.stage, args.input is not None)
    inputs = _read_graphs(args.input, spec.colors, spec.d) if args.input else None
    config = RunConfig(
        spec, stages, inputs, count_limit=args.limit, time_limit=args.time_limit,
        relax=args.relax, restrict=args.restrict, workers=args.workers,
        oracle_verify=args.oracle_verify,
    )
    result = run(config)
    body = "" if args.count_only else write_graphs(result.graphs)
    stats = dict(result.stats)
    stats["exit.status"] = result.status
    _emit(body + format_stats(stats), args.output)
    return result.status


def _cmd_oracle(args) -> int:
    from .oracle import enumerate_all

    spec: PathSpec | None = None
    table = DEFAULT_COLORS
    if args.spec:
        spec = parse_spec(Path(args.spec).read_text(encoding="utf-8"))
        table = spec.colors
    if args.formula:
        atoms = parse_formula(args.formula, table)
    elif spec is not None:
        atoms = spec.atoms
    else:
        raise ValueError("oracle needs --formula or --spec")
    d = args.d if args.d is not None else (spec.d if spec else 3)
    found = enumerate_all(ShapeClass.parse(args.shape), atoms, d, table, spec)
    body = "" if args.count_only else write_graphs(found)
    _emit(body + format_stats({"oracle.count": len(found)}), args.output)
    return EXIT_OK if len(found) else EXIT_NO_SOLUTIONS


def _cmd_instance(args) -> int:
    sample = _read_graphs(args.sample, DEFAULT_COLORS, args.d)
    if len(sample) != 1:
        raise ValueError(f"expected one sample graph, found {len(sample)}")
    spec = build_instance(sample[0], args.N, args.L, args.s, args.mode)
    _emit(format_spec(spec), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chemenum", description="Enumerate bi-block 2-augmented chemical graphs.")
    p.add_argument("-v", "--verbose", action="store_true", help="log stage progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="run the tree/mono/biblock pipeline")
    e.add_argument("--spec", required=True, help="spec file")
    e.add_argument("--stage", choices=_STAGE_CHOICES, default="all")
    e.add_argument("--input", help="seed graphs for the first requested stage ('-' for stdin)")
    e.add_argument("--output", help="output file (default stdout)")
    e.add_argument("--count-only", action="store_true")
    e.add_argument("--limit", type=int, help="stop with status 4 past this many graphs")
    e.add_argument("--time-limit", type=float, default=60.0, help="wall seconds (default 60)")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--oracle-verify", action="store_true", help="cross-check against brute force (n <= 9)")
    e.add_argument("--relax", type=int, default=0, help="extra lower-bound relaxation steps")
    e.add_argument("--restrict", action=argparse.BooleanOptionalAction, default=None,
                   help="keep only monocyclic graphs with a pendent tree of >= n/2 vertices")
    e.set_defaults(func=_cmd_enumerate)

    o = sub.add_parser("oracle", help="brute-force enumeration for small n")
    o.add_argument("--shape", default="biblock")
    o.add_argument("--formula", help="e.g. C4N2O")
    o.add_argument("--d", type=int)
    o.add_argument("--spec")
    o.add_argument("--output")
    o.add_argument("--count-only", action="store_true")
    o.set_defaults(func=_cmd_oracle)

    i = sub.add_parser("instance", help="build a spec file from one sample graph")
    i.add_argument("--sample", required=True, help="graph file holding one graph")
    i.add_argument("--N", type=int, required=True)
    i.add_argument("--L", type=int, required=True)
    i.add_argument("--s", type=int, default=0)
    i.add_argument("--mode", choices=("A", "P", "none"), default="A")
    i.add_argument("--d", type=int, default=3, help="multiplicity bound used while parsing")
    i.add_argument("--output")
    i.set_defaults(func=_cmd_instance)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SpecError, GraphError, ValueError, OSError) as exc:
        print(f"chemenum: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
