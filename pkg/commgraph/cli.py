"""
Command-line interface

Exit codes: 0 success, 1 a check failed, 2 usage or input error,
3 a cap was exceeded or a file could not be read or written.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from .alternating import b_distance, b_graph
from .cache import LatticeCache
from .catalog import group
from .config import Settings
from .exceptions import (
    CacheError,
    CapExceededError,
    CommGraphError,
    ComponentInvariantError,
)
from .graphs import (
    build_graph,
    components,
    export_dot,
    export_json,
    geodesic,
    import_json,
)
from .lattice import lattice_of
from .verify import SuiteConfig, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _points(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated points, got {text!r}") from e


def _settings(args: argparse.Namespace) -> Settings:
    return Settings.from_env(cache_dir=args.cache_dir, seed=args.seed)


def _write(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        out.write_text(text)
        logger.info("Wrote %s", out)


def _graph_build(args: argparse.Namespace) -> int:
    settings = _settings(args)
    g = group(args.group, settings)
    graph = build_graph(g, args.prime, settings, LatticeCache(settings=settings))
    _write(export_json(graph), args.out)
    if args.dot:
        _write(export_dot(graph), args.dot)
    return EXIT_OK


def _graph_components(args: argparse.Namespace) -> int:
    graph = import_json(args.infile.read_text())
    for report in components(graph):
        print(report.model_dump_json())
    return EXIT_OK


def _graph_geodesic(args: argparse.Namespace) -> int:
    graph = import_json(args.infile.read_text())
    path = geodesic(graph, args.source, args.target)
    print(json.dumps(path))
    return EXIT_OK


def _lattice_enum(args: argparse.Namespace) -> int:
    settings = _settings(args)
    lattice = lattice_of(group(args.group, settings), settings, LatticeCache(settings=settings))
    for sub in lattice:
        print(sub.order, sub.id, " ".join(sub.generator_strings()) or "()")
    return EXIT_OK


def _alt_bgraph(args: argparse.Namespace) -> int:
    bg = b_graph(args.x, args.p, args.k)
    summary = {
        "x": args.x,
        "prime": args.p,
        "k": args.k,
        "vertices": len(bg),
        "edges": bg.graph.edge_count,
        "types": bg.type_counts(),
        "valences": bg.valences_by_type(),
    }
    print(json.dumps(summary))
    if args.dot:
        _write(export_dot(bg.graph), args.dot)
    return EXIT_OK


def _alt_distance(args: argparse.Namespace) -> int:
    bg = b_graph(args.x, args.p, args.k)
    print(b_distance(bg, args.o1, args.o2))
    return EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    settings = _settings(args)
    config = SuiteConfig(
        tier="fast" if args.fast else "full",
        seed=settings.seed,
        settings=settings,
        checks=tuple(args.checks) if args.checks else None,
    )
    report = run_suite(config, LatticeCache(settings=settings))
    for record in report.checks:
        print(f"{record.status:8} {record.name} ({record.duration:.2f}s)")
        if not record.passed:
            print(f"         witness: {json.dumps(record.witness)}")
    print(f"{report.status}: {len(report.checks)} checks, {len(report.failures())} failed")
    if args.json:
        _write(report.model_dump_json(indent=2), args.json)
    return EXIT_OK if report.status == "passed" else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="commgraph",
        description="p-local commensurability graphs of finite permutation groups",
    )
    parser.add_argument("--cache-dir", type=Path, default=None, help="lattice cache directory")
    parser.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    graph_parser = commands.add_parser("graph", help="build and analyse Γ_p(G)")
    graph_commands = graph_parser.add_subparsers(dest="action", required=True)

    build = graph_commands.add_parser("build", help="build the graph of a group")
    build.add_argument("--group", required=True, help="group descriptor, e.g. sym:3")
    build.add_argument("--prime", type=int, required=True)
    build.add_argument("--out", type=Path, default=None, help="JSON output file")
    build.add_argument("--dot", type=Path, default=None, help="DOT output file")
    build.set_defaults(handler=_graph_build)

    comps = graph_commands.add_parser("components", help="component analytics")
    comps.add_argument("--in", dest="infile", type=Path, required=True)
    comps.set_defaults(handler=_graph_components)

    geo = graph_commands.add_parser("geodesic", help="least shortest path")
    geo.add_argument("--in", dest="infile", type=Path, required=True)
    geo.add_argument("--from", dest="source", required=True)
    geo.add_argument("--to", dest="target", required=True)
    geo.set_defaults(handler=_graph_geodesic)

    lattice_parser = commands.add_parser("lattice", help="subgroup lattices")
    lattice_commands = lattice_parser.add_subparsers(dest="action", required=True)
    enum = lattice_commands.add_parser("enum", help="list every subgroup")
    enum.add_argument("--group", required=True)
    enum.set_defaults(handler=_lattice_enum)

    alt_parser = commands.add_parser("alt", help="alternating-group B-graphs")
    alt_commands = alt_parser.add_subparsers(dest="action", required=True)
    for name, handler in (("bgraph", _alt_bgraph), ("distance", _alt_distance)):
        sub = alt_commands.add_parser(name)
        sub.add_argument("--x", type=int, required=True)
        sub.add_argument("--p", type=int, required=True)
        sub.add_argument("--k", type=int, required=True)
        sub.set_defaults(handler=handler)
        if name == "bgraph":
            sub.add_argument("--dot", type=Path, default=None)
        else:
            sub.add_argument("--o1", type=_points, required=True)
            sub.add_argument("--o2", type=_points, required=True)

    verify = commands.add_parser("verify", help="run the verification suite")
    verify.add_argument("--fast", action="store_true", help="leave out Alt_7 targets")
    verify.add_argument("--json", type=Path, default=None, help="report output file")
    verify.add_argument(
        "--check", dest="checks", action="append", default=None, help="run only this check"
    )
    verify.set_defaults(handler=_verify)
    return parser


# Most specific first
_EXIT_CODES: Dict[type, int] = {
    ComponentInvariantError: EXIT_CHECK_FAILED,
    CapExceededError: EXIT_RESOURCE,
    CacheError: EXIT_RESOURCE,
    CommGraphError: EXIT_USAGE,
    OSError: EXIT_RESOURCE,
    ValueError: EXIT_USAGE,
}


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler: Callable[[argparse.Namespace], int] = args.handler
    try:
        return handler(args)
    except (CommGraphError, OSError, ValueError) as e:
        code = next(c for kind, c in _EXIT_CODES.items() if isinstance(e, kind))
        logger.error("%s", e)
        return code


def main() -> None:
    sys.exit(cli_main())
