"""Line-oriented text formats for games and partitions.

Game files::

    # comment
    fhg 5 directed weighted
    default -10
    1 2 2
    2 1 1/2
    subsidy 3 4

Players are 1-indexed on disk and 0-indexed in memory.  Weights may be
integers, exact decimals or ``p/q``.  A file without a header is read as
a plain undirected edge list.
"""
from __future__ import annotations

from fractions import Fraction

from .model import AnyGame, Game, Partition, SupportedGame, base_game, to_rational

__all__ = [
    "GameFileError",
    "parse_game",
    "serialize_game",
    "parse_partition",
    "serialize_partition",
    "format_rational",
]


class GameFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _player(token: str, n: int | None, lineno: int) -> int:
    try:
        p = int(token)
    except ValueError:
        raise GameFileError(f"player label {token!r} is not an integer", lineno) from None
    if p < 1 or (n is not None and p > n):
        raise GameFileError(f"player {p} outside 1..{n}", lineno)
    return p - 1


def _weight(token: str, lineno: int) -> Fraction:
    try:
        return to_rational(token)
    except ValueError:
        raise GameFileError(f"malformed weight {token!r}", lineno) from None


def parse_game(text: str) -> AnyGame:
    """Parse a game file; returns a :class:`SupportedGame` if it has subsidy records."""
    records = list(_records(text))
    if not records:
        raise GameFileError("empty game file")
    if records[0][1][0] != "fhg":
        return _parse_edge_list(records)

    lineno, head = records[0]
    if len(head) != 4 or head[2] not in ("directed", "undirected") or head[3] not in ("simple", "weighted"):
        raise GameFileError("header must read 'fhg N directed|undirected simple|weighted'", lineno)
    try:
        n = int(head[1])
    except ValueError:
        raise GameFileError(f"player count {head[1]!r} is not an integer", lineno) from None
    if n < 1:
        raise GameFileError("player count must be positive", lineno)
    directed = head[2] == "directed"
    simple = head[3] == "simple"

    default = Fraction(0)
    arcs: dict[tuple[int, int], Fraction] = {}
    subsidies: dict[int, int] = {}
    seen_default = False
    for lineno, tok in records[1:]:
        if tok[0] == "default":
            if simple:
                raise GameFileError("default weight on a simple game", lineno)
            if len(tok) != 2 or seen_default:
                raise GameFileError("expected a single 'default W' directive", lineno)
            default = _weight(tok[1], lineno)
            seen_default = True
        elif tok[0] == "subsidy":
            if len(tok) != 3:
                raise GameFileError("expected 'subsidy PLAYER L'", lineno)
            p = _player(tok[1], n, lineno)
            try:
                l = int(tok[2])
            except ValueError:
                raise GameFileError(f"subsidy parameter {tok[2]!r} is not an integer", lineno) from None
            if l < 2:
                raise GameFileError("subsidy parameter must be at least 2", lineno)
            if p in subsidies:
                raise GameFileError(f"duplicate subsidy for player {p + 1}", lineno)
            subsidies[p] = l
        else:
            if len(tok) not in (2, 3):
                raise GameFileError("expected 'U V' or 'U V W'", lineno)
            u, v = _player(tok[0], n, lineno), _player(tok[1], n, lineno)
            if u == v:
                raise GameFileError(f"self-loop on player {u + 1}", lineno)
            if simple and len(tok) == 3:
                raise GameFileError("weight given on a simple game", lineno)
            if not simple and len(tok) == 2:
                raise GameFileError("missing weight in a weighted game", lineno)
            w = Fraction(1) if simple else _weight(tok[2], lineno)
            keys = [(u, v)] if directed else [(u, v), (v, u)]
            if any(k in arcs for k in keys):
                raise GameFileError(f"duplicate edge {u + 1} {v + 1}", lineno)
            for k in keys:
                arcs[k] = w
    game = Game.from_weights(n, arcs, default=default)
    return SupportedGame(game, subsidies) if subsidies else game


def _parse_edge_list(records) -> Game:
    edges = []
    seen = set()
    for lineno, tok in records:
        if len(tok) != 2:
            raise GameFileError("edge list lines need exactly two player labels", lineno)
        u, v = _player(tok[0], None, lineno), _player(tok[1], None, lineno)
        if u == v:
            raise GameFileError(f"self-loop on player {u + 1}", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GameFileError(f"duplicate edge {u + 1} {v + 1}", lineno)
        seen.add(key)
        edges.append(key)
    n = max(max(e) for e in edges) + 1
    return Game.from_edges(n, edges)


def serialize_game(game: AnyGame) -> str:
    """Write a game file; ``parse_game(serialize_game(g)) == g``."""
    g = base_game(game)
    n = g.n
    directed = not g.is_symmetric
    simple = g.is_simple and g.is_symmetric
    lines = [f"fhg {n} {'directed' if directed else 'undirected'} {'simple' if simple else 'weighted'}"]
    off_diag = [g.valuations[i][j] for i in range(n) for j in range(n) if i != j]
    default = Fraction(0)
    if not simple and off_diag:
        # the most common weight becomes the default to keep files short
        counts: dict[Fraction, int] = {}
        for w in off_diag:
            counts[w] = counts.get(w, 0) + 1
        default = max(sorted(counts), key=lambda w: counts[w])
        if default != 0:
            lines.append(f"default {format_rational(default)}")
    for i in range(n):
        for j in range(n):
            if i == j or (not directed and j < i):
                continue
            w = g.valuations[i][j]
            if simple:
                if w:
                    lines.append(f"{i + 1} {j + 1}")
            elif w != default:
                lines.append(f"{i + 1} {j + 1} {format_rational(w)}")
    if isinstance(game, SupportedGame):
        lines += [f"subsidy {p + 1} {l}" for p, l in game.subsidies.items()]
    return "\n".join(lines) + "\n"


def serialize_partition(partition: Partition) -> str:
    return "".join(" ".join(str(i + 1) for i in sorted(block)) + "\n" for block in partition)


def parse_partition(text: str, game: AnyGame | int) -> Partition:
    """Parse one coalition per line against a game (or a player count)."""
    n = game if isinstance(game, int) else game.n
    blocks = []
    owner: dict[int, int] = {}
    for lineno, tok in _records(text):
        block = []
        for t in tok:
            p = _player(t, n, lineno)
            if p in owner:
                raise GameFileError(f"player {p + 1} already listed on line {owner[p]}", lineno)
            owner[p] = lineno
            block.append(p)
        blocks.append(block)
    missing = [i + 1 for i in range(n) if i not in owner]
    if missing:
        raise GameFileError(f"players missing from the partition: {missing}")
    return Partition(blocks, n)
