"""Command-line front end.

Exit codes: 0 success or stable, 1 unstable (or a failed expectation),
2 unknown because a search budget ran out, 3 usage, parse or
precondition error.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from typing import Sequence

from . import instances, solvers
from .io import GameFileError, format_rational, parse_game, parse_partition, serialize_game, serialize_partition
from .model import Game, Partition, TypeSpace, base_game, connected_components, girth, is_forest, two_coloring
from .stability import (
    BlockingCertificate,
    Kind,
    SearchBudget,
    Verdict,
    blocks,
    deviation_walk,
    enumerate_partitions,
    find_blocking,
    max_exhaustive_players,
    stable_partitions,
)

EXIT_OK, EXIT_UNSTABLE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
MAX_NODES_ENV = "FHG_MAX_NODES"

_VERDICT_EXIT = {Verdict.STABLE: EXIT_OK, Verdict.UNSTABLE: EXIT_UNSTABLE, Verdict.UNKNOWN: EXIT_UNKNOWN}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _members(coalition) -> str:
    return " ".join(str(i + 1) for i in sorted(coalition))


def _emit(out, key: str, value) -> None:
    out.write(f"{key}: {value}\n")


def _budget(args, game) -> SearchBudget:
    max_nodes = args.max_nodes
    if max_nodes is None and os.environ.get(MAX_NODES_ENV):
        try:
            max_nodes = int(os.environ[MAX_NODES_ENV])
        except ValueError:
            raise UsageError(f"{MAX_NODES_ENV} must be an integer") from None
    g = base_game(game)
    if args.search == "auto":
        connected = g.is_simple and g.is_symmetric
    else:
        connected = args.search == "connected"
    return SearchBudget(max_coalition_size=args.max_size, max_nodes=max_nodes, connected_only=connected)


def _write_certificate(out, cert: BlockingCertificate) -> None:
    _emit(out, "certificate", _members(cert.coalition))
    _emit(out, "certificate-kind", cert.kind.value)
    for i, before, after in cert.member_deltas:
        _emit(out, "delta", f"{i + 1} {format_rational(before)} -> {format_rational(after)}")


# ---------------------------------------------------------------------------
# subcommands


def _types_of(game: Game) -> TypeSpace:
    """Recover the types of a complete multipartite graph."""
    game.require_simple_symmetric()
    adj = game.adjacency
    everyone = frozenset(range(game.n))
    label: dict[frozenset, int] = {}
    assignment = []
    for i in range(game.n):
        part = everyone - adj[i]
        assignment.append(label.setdefault(part, len(label)))
    ts = TypeSpace(assignment)
    if not all(everyone - adj[i] == t for t in ts.types() for i in t):
        raise solvers.PreconditionError("graph is not complete multipartite")
    return ts


def cmd_solve(args, out) -> int:
    game = parse_game(_read(args.game))
    g = base_game(game)
    if game is not g:
        raise UsageError("solvers take plain games without subsidies")
    if args.cls == "degree2":
        part = solvers.solve_degree2(g)
    elif args.cls == "forest":
        part = solvers.solve_forest(g)
    elif args.cls == "bakers-millers":
        part = solvers.solve_bakers_millers_finest(_types_of(g))
    elif args.cls == "matching":
        part = solvers.solve_bipartite_matching(g)
    else:
        part = solvers.solve_star_packing(g, force=args.force)
    out.write(serialize_partition(part))
    if args.verify:
        concept = Kind.WEAK if args.cls == "bakers-millers" else Kind.STRONG
        res = find_blocking(g, part, concept, _budget(args, g), workers=args.threads)
        verdict = "unstable" if res.certificate else ("stable" if res.complete else "unknown")
        out.write(f"# {'strict-core' if concept is Kind.WEAK else 'core'}: {verdict}\n")
        if res.certificate:
            return EXIT_UNSTABLE
        return EXIT_OK if res.complete else EXIT_UNKNOWN
    return EXIT_OK


def _check_certificate(args, game, part, out) -> int:
    coalition, kind = None, Kind.STRONG
    deltas = []
    for line in _read(args.check_certificate).splitlines():
        key, _, value = line.partition(":")
        key, value = key.strip(), value.strip()
        if key == "certificate":
            try:
                coalition = frozenset(int(t) - 1 for t in value.split())
            except ValueError:
                raise UsageError(f"bad certificate line {line!r}") from None
        elif key == "certificate-kind":
            kind = Kind(value)
        elif key == "delta":
            deltas.append(value)
    if coalition is None:
        raise UsageError("certificate file has no 'certificate:' line")
    if not coalition or not all(0 <= i < game.n for i in coalition):
        raise UsageError("certificate names players outside the game")
    cert = BlockingCertificate.build(game, part, coalition, kind)
    fresh = [f"{i + 1} {format_rational(b)} -> {format_rational(a)}" for i, b, a in cert.member_deltas]
    ok = blocks(game, part, coalition, kind) and (not deltas or deltas == fresh)
    _emit(out, "certificate", _members(coalition))
    _emit(out, "certificate-check", "valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_UNSTABLE


def cmd_verify(args, out) -> int:
    game = parse_game(_read(args.game))
    part = parse_partition(_read(args.partition), game)
    if args.check_certificate:
        return _check_certificate(args, game, part, out)
    kind = Kind.STRONG if args.concept == "core" else Kind.WEAK
    budget = _budget(args, game)
    res = find_blocking(game, part, kind, budget, workers=args.threads)
    if res.certificate is not None:
        verdict = Verdict.UNSTABLE
    else:
        verdict = Verdict.STABLE if res.complete else Verdict.UNKNOWN
    method = "connected search" if budget.connected_only else "all-subsets search"
    if budget.max_coalition_size is not None:
        method += f", size <= {budget.max_coalition_size}"
    _emit(out, "concept", args.concept)
    _emit(out, "verdict", verdict.value)
    _emit(out, "method", method)
    _emit(out, "nodes", res.nodes)
    if res.certificate is not None:
        _write_certificate(out, res.certificate)
    if args.expect:
        return EXIT_OK if verdict.value == args.expect else _VERDICT_EXIT[verdict] or EXIT_UNSTABLE
    return _VERDICT_EXIT[verdict]


def cmd_gadget(args, out) -> int:
    if args.list or not args.name:
        for name, build in instances.GADGETS.items():
            info = build()
            out.write(f"{name}: {info.description}\n")
        return EXIT_OK
    try:
        info = instances.gadget_info(args.name)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if args.partition:
        if info.partition is None:
            raise UsageError(f"gadget {args.name!r} has no distinguished partition")
        out.write(serialize_partition(info.partition))
    else:
        out.write(f"# {info.name}: {info.description}\n")
        out.write(serialize_game(info.game))
    return EXIT_OK


def cmd_reduce(args, out) -> int:
    game = parse_game(_read(args.game))
    if args.kind == "supported":
        if game is base_game(game):
            raise UsageError("the input has no subsidy records")
        reduced, _ = instances.reduce_supported(game)
        out.write(serialize_game(reduced))
    elif args.kind == "clique":
        if args.k is None:
            raise UsageError("reduce clique needs --k")
        sg, _ = instances.clique_verification_gadget(base_game(game), args.k)
        out.write(serialize_game(sg))
    else:
        if args.rows is None or args.m is None:
            raise UsageError("reduce maxmin-clique needs --rows and --m")
        sg, _ = instances.reduce_maxmin_clique(instances.GridCliqueInstance(base_game(game), args.rows, args.m))
        out.write(serialize_game(sg))
    return EXIT_OK


def cmd_walk(args, out) -> int:
    game = parse_game(_read(args.game))
    if args.start:
        start = parse_partition(_read(args.start), game)
    elif args.seed is not None:
        rng = random.Random(args.seed)
        start = Partition.from_labels([rng.randrange(args.labels) for _ in range(game.n)])
    else:
        start = Partition.singletons(game.n)
    res = deviation_walk(game, start, args.max_steps, _budget(args, game))
    for step, cert in enumerate(res.trace, 1):
        _emit(out, "step", f"{step} {_members(cert.coalition)} gain {format_rational(cert.min_gain)}")
    _emit(out, "result", res.reason)
    _emit(out, "steps", res.steps)
    if res.cycle_start is not None:
        _emit(out, "cycle-start", res.cycle_start)
    for block in res.partition:
        _emit(out, "final", _members(block))
    if res.converged:
        return EXIT_OK
    return EXIT_UNKNOWN if res.reason == "unknown" else EXIT_UNSTABLE


def cmd_enumerate(args, out) -> int:
    game = parse_game(_read(args.game))
    kind = Kind.STRONG if args.concept == "core" else Kind.WEAK
    bound = args.bound if args.bound is not None else max_exhaustive_players
    if game.n > bound:
        raise UsageError(f"{game.n} players exceed the enumeration bound {bound}; raise --bound")
    total = sum(1 for _ in enumerate_partitions(game.n, bound))
    stable = list(stable_partitions(game, kind, bound))
    _emit(out, "concept", args.concept)
    _emit(out, "partitions", total)
    _emit(out, "stable", len(stable))
    for part in stable[: args.show]:
        _emit(out, "partition", " | ".join(_members(b) for b in part))
    return EXIT_OK if stable else EXIT_UNSTABLE


def cmd_stats(args, out) -> int:
    game = parse_game(_read(args.game))
    g = base_game(game)
    graph = g.is_simple and g.is_symmetric
    _emit(out, "players", g.n)
    _emit(out, "directed", str(not g.is_symmetric).lower())
    _emit(out, "simple", str(g.is_simple).lower())
    _emit(out, "supported", len(getattr(game, "subsidies", {})))
    if g.is_symmetric:
        _emit(out, "edges", len(g.edges()))
        _emit(out, "max-degree", g.max_degree)
        _emit(out, "components", len(connected_components(g)))
    if graph:
        gi = girth(g)
        _emit(out, "girth", "inf" if gi == float("inf") else gi)
        _emit(out, "forest", str(is_forest(g)).lower())
        _emit(out, "bipartite", str(two_coloring(g) is not None).lower())
    return EXIT_OK


# ---------------------------------------------------------------------------


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--search", choices=["auto", "connected", "all"], default="auto",
                   help="connected-only search needs a simple symmetric game (default: auto)")
    p.add_argument("--max-size", type=int, help="largest coalition size to search")
    p.add_argument("--max-nodes", type=int, help=f"node budget (default from ${MAX_NODES_ENV})")
    p.add_argument("--threads", type=int, default=1, help="worker processes for connected search")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fhg", description="Core stability tools for fractional hedonic games.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="build a stable partition for a special graph class")
    p.add_argument("game")
    p.add_argument("--class", dest="cls", required=True,
                   choices=["degree2", "forest", "bakers-millers", "matching", "star-packing"])
    p.add_argument("--force", action="store_true", help="run star packing below girth five")
    p.add_argument("--verify", action="store_true", help="append the verified verdict as a comment")
    _add_search_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="search for a blocking coalition")
    p.add_argument("game")
    p.add_argument("--partition", required=True)
    p.add_argument("--concept", choices=["core", "strict-core"], default="core")
    p.add_argument("--expect", choices=["stable", "unstable"])
    p.add_argument("--check-certificate", metavar="REPORT", help="re-verify a certificate from an earlier report")
    _add_search_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gadget", help="emit a named example game")
    p.add_argument("name", nargs="?")
    p.add_argument("--partition", action="store_true", help="emit the gadget's distinguished partition")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("reduce", help="apply a hardness reduction")
    p.add_argument("kind", choices=["supported", "maxmin-clique", "clique"])
    p.add_argument("game")
    p.add_argument("--k", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--m", type=int)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("walk", help="follow blocking coalitions from a start partition")
    p.add_argument("game")
    p.add_argument("--start")
    p.add_argument("--seed", type=int, help="random start partition")
    p.add_argument("--labels", type=int, default=4, help="coalition labels for random starts")
    p.add_argument("--max-steps", type=int, default=1000)
    _add_search_flags(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("enumerate", help="list every stable partition by brute force")
    p.add_argument("game")
    p.add_argument("--concept", choices=["core", "strict-core"], default="core")
    p.add_argument("--bound", type=int)
    p.add_argument("--show", type=int, default=20, help="stable partitions to print")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("stats", help="summarise a game file")
    p.add_argument("game")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args, out)
    except (UsageError, GameFileError, solvers.PreconditionError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        print(f"fhg: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
