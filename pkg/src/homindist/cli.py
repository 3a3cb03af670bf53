"""Command-line front end. Every subcommand is a thin wrapper over a library call.

Exit codes: 0 success or equivalent, 1 distinguished, invalid or refused,
2 usage or input error. Numbers are printed as decimal strings.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .bilabelled import BilabelledGraph
from .construction import STRATEGIES, synthesize_all_graphs, synthesize_planar
from .deciders import decide, decide_planar_bounded
from .expr import SExprError, arity, eval_tensor, parse_sexpr, to_sexpr
from .graphs import Graph, GraphFormatError, parse_graph6, write_graph6
from .homomorphism import hom_count, hom_tensor, soe
from .partitions import Partition, classify, closure, named_partition
from .witness import KINDS, SYNTH_KINDS, QuantumMatrix, Refusal, check_conjugation, check_kind, synth_witness

__all__ = ["main", "dispatch", "build_parser"]


class InputError(Exception):
    """Unreadable or malformed input file; reported on one line with exit code 2."""


# ---------------------------------------------------------------- input helpers


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None


def _graph(path: str) -> Graph:
    text = _read(path)
    offset = 0
    for line in text.splitlines(keepends=True):
        body = line.strip()
        if body:
            try:
                return parse_graph6(body)
            except GraphFormatError as exc:
                raise InputError(f"{path}: line starting at byte {offset}: {exc}") from None
        offset += len(line.encode())
    raise InputError(f"{path}: no graph found")


def _json(path: str) -> dict:
    text = _read(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: byte {len(text[: exc.pos].encode())}: {exc.msg}") from None


def _load(path: str, loader):
    data = _json(path)
    try:
        return loader(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {type(exc).__name__}: {exc}") from None


def _partition(name_or_path: str) -> Partition:
    """A named partition or a path to a partition JSON file."""
    if Path(name_or_path).is_file():
        return _load(name_or_path, Partition.from_json)
    try:
        return named_partition(name_or_path)
    except (KeyError, ValueError) as exc:
        raise InputError(f"unknown partition {name_or_path!r}: {exc}") from None


def _emit(data) -> None:
    print(json.dumps(data, indent=2))


# ---------------------------------------------------------------- subcommands


def _cmd_hom(args) -> int:
    print(hom_count(_graph(args.pattern), _graph(args.target)))
    return 0


def _cmd_tensor(args) -> int:
    k = _load(args.bilabelled, BilabelledGraph.from_json)
    t = hom_tensor(k, _graph(args.target))
    text = json.dumps(t.to_json(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0


def _cmd_decide(args) -> int:
    g, h = _graph(args.g), _graph(args.h)
    if args.level == "planar":
        progress = None
        if args.verbose:
            def progress(f, counts):
                print(f"{write_graph6(f)} {counts[0]} {counts[1]}", file=sys.stderr, flush=True)
        verdict = decide_planar_bounded(g, h, args.max_size, progress)
    else:
        verdict = decide(args.level, g, h)
    _emit(verdict.to_json())
    return 0 if verdict.equivalent else 1


def _cmd_synth(args) -> int:
    if args.what == "planar":
        k = _load(args.input, BilabelledGraph.from_json)
        expr = synthesize_planar(k, verify=not args.no_verify)
    else:
        expr = synthesize_all_graphs(_graph(args.input), args.strategy)
    print(to_sexpr(expr))
    return 0


def _cmd_eval(args) -> int:
    text = _read(args.expr)
    try:
        expr = parse_sexpr(text)
        arity(expr)
    except SExprError as exc:
        raise InputError(f"{args.expr}: {exc}") from None
    t = eval_tensor(expr, _graph(args.target))
    if args.soe or (t.p, t.q) == (0, 0):
        print(soe(t))
    else:
        _emit(t.to_json())
    return 0


def _cmd_partition(args) -> int:
    if args.action == "classify":
        names = sorted(classify(_partition(args.partition), args.s))
        _emit(names)
        return 0
    gens = [_partition(s) for s in args.gen.split(",") if s.strip()]
    found = closure(gens, args.max_points)
    found = sorted(found, key=lambda p: (p.num_points, p.lower, p.labels, p.empty_blocks))
    _emit({"count": len(found), "partitions": [p.to_json() for p in found]})
    return 0


def _cmd_witness(args) -> int:
    if args.action == "check":
        u = _load(args.matrix, QuantumMatrix.from_json)
        reports = [check_kind(u, args.kind)]
        if args.graphs:
            reports.append(check_conjugation(u, _graph(args.graphs[0]), _graph(args.graphs[1])))
        _emit([r.to_json() for r in reports])
        return 0 if all(r.passed for r in reports) else 1
    result = synth_witness(_graph(args.g), _graph(args.h), args.kind)
    _emit(result.to_json())
    return 1 if isinstance(result, Refusal) else 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homindist", description="Homomorphism indistinguishability toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hom", help="count homomorphisms from a pattern to a target")
    p.add_argument("--pattern", required=True, help="graph6 file")
    p.add_argument("--target", required=True, help="graph6 file")
    p.set_defaults(run=_cmd_hom)

    p = sub.add_parser("tensor", help="homomorphism tensor of a bilabelled graph")
    p.add_argument("--bilabelled", required=True, help="bilabelled graph JSON")
    p.add_argument("--target", required=True, help="graph6 file")
    p.add_argument("--out", help="write tensor JSON here instead of stdout")
    p.set_defaults(run=_cmd_tensor)

    p = sub.add_parser("decide", help="decide homomorphism indistinguishability")
    levels = p.add_subparsers(dest="level", required=True)
    for level in ("cycles", "paths-cycles", "iso", "planar"):
        q = levels.add_parser(level)
        if level == "planar":
            q.add_argument("--max-size", type=int, required=True, help="largest pattern order (1..7)")
            q.add_argument("--verbose", action="store_true", help="print each pattern and its counts to stderr")
        q.add_argument("g", help="graph6 file")
        q.add_argument("h", help="graph6 file")
    p.set_defaults(run=_cmd_decide)

    p = sub.add_parser("synth", help="build an expression for a graph")
    what = p.add_subparsers(dest="what", required=True)
    q = what.add_parser("planar", help="planar bilabelled graph with doubled labels")
    q.add_argument("input", help="bilabelled graph JSON")
    q.add_argument("--no-verify", action="store_true", help="skip the self-checks")
    q = what.add_parser("graph", help="any graph as a (0,0) expression")
    q.add_argument("input", help="graph6 file")
    q.add_argument("--strategy", choices=STRATEGIES, default="swap")
    p.set_defaults(run=_cmd_synth)

    p = sub.add_parser("eval", help="evaluate an expression on a target graph")
    p.add_argument("--expr", required=True, help="S-expression file")
    p.add_argument("--target", required=True, help="graph6 file")
    p.add_argument("--soe", action="store_true", help="print the sum of entries only")
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("partition", help="partition categories")
    action = p.add_subparsers(dest="action", required=True)
    q = action.add_parser("classify", help="list the categories containing a partition")
    q.add_argument("partition", help="partition JSON file or partition name")
    q.add_argument("--s", type=int, default=None, help="parameter for the E_h^s family")
    q = action.add_parser("closure", help="enumerate a generated category")
    q.add_argument("--gen", default="", help="comma-separated partition names or JSON files")
    q.add_argument("--max-points", type=int, required=True)
    p.set_defaults(run=_cmd_partition)

    p = sub.add_parser("witness", help="check or build matrix witnesses")
    action = p.add_subparsers(dest="action", required=True)
    q = action.add_parser("check", help="check the relations of a quantum matrix")
    q.add_argument("matrix", help="quantum matrix JSON")
    q.add_argument("--kind", choices=KINDS, required=True)
    q.add_argument("--graphs", nargs=2, metavar=("G", "H"), help="also check U A_G = A_H U")
    q = action.add_parser("synth", help="build a classical witness")
    q.add_argument("g", help="graph6 file")
    q.add_argument("h", help="graph6 file")
    q.add_argument("--kind", choices=SYNTH_KINDS, required=True)
    p.set_defaults(run=_cmd_witness)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


dispatch = main


if __name__ == "__main__":
    sys.exit(main())
