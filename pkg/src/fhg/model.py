"""Exact representation of fractional hedonic games, partitions and type spaces.

Players are dense 0-based integers.  Valuations are stored as
:class:`fractions.Fraction` so every utility comparison is exact.
"""
from __future__ import annotations

import enum
import math
from collections import deque
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Iterator, Mapping, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "to_rational",
    "Game",
    "SupportedGame",
    "Partition",
    "TypeSpace",
    "Preference",
    "base_game",
    "utility",
    "prefers",
    "is_individually_rational",
    "connected_components",
    "girth",
    "two_coloring",
    "is_forest",
    "NotSimpleSymmetricError",
]


class NotSimpleSymmetricError(ValueError):
    """Raised when a graph algorithm is handed a weighted or directed game."""


def to_rational(value) -> Fraction:
    """Convert an int, Fraction or decimal/``p/q`` string to an exact rational.

    Floats are rejected: their binary expansion is rarely the value the
    caller meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not valuations")
    if isinstance(value, float):
        raise TypeError(f"float valuation {value!r}; pass a string or Fraction")
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value!r}") from exc
    return Fraction(value)


class Game:
    """A fractional hedonic game given by its full valuation matrix.

    ``valuations[i][j]`` is the value player ``i`` assigns to player ``j``.
    The diagonal must be zero; use :meth:`from_unnormalized` for matrices
    that do not satisfy this.
    """

    __slots__ = ("n", "valuations", "is_simple", "is_symmetric", "__dict__")

    def __init__(self, valuations: Sequence[Sequence]):
        rows = tuple(tuple(to_rational(x) for x in row) for row in valuations)
        n = len(rows)
        if n == 0:
            raise ValueError("a game needs at least one player")
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValueError(f"row {i} has {len(row)} entries, expected {n}")
            if row[i] != 0:
                raise ValueError(f"v_{i}({i}) = {row[i]} but self-valuations must be 0")
        self.n = n
        self.valuations = rows
        self.is_simple = all(
            rows[i][j] in (0, 1) for i in range(n) for j in range(n) if i != j
        )
        self.is_symmetric = all(
            rows[i][j] == rows[j][i] for i in range(n) for j in range(i + 1, n)
        )

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Game":
        """Simple symmetric game of an undirected graph on ``0..n-1``."""
        mat = [[0] * n for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) outside 0..{n - 1}")
            mat[u][v] = mat[v][u] = 1
        return cls(mat)

    @classmethod
    def from_weights(
        cls,
        n: int,
        weights: Mapping[tuple[int, int], object] | Iterable[tuple[int, int, object]],
        *,
        default=0,
        symmetric: bool = False,
    ) -> "Game":
        """Weighted game; unlisted off-diagonal pairs get ``default``.

        With ``symmetric=True`` each listed pair sets both directions.
        """
        if isinstance(weights, Mapping):
            items = [(u, v, w) for (u, v), w in weights.items()]
        else:
            items = list(weights)
        d = to_rational(default)
        mat = [[Fraction(0) if i == j else d for j in range(n)] for i in range(n)]
        for u, v, w in items:
            if u == v:
                raise ValueError(f"self-loop on {u}")
            mat[u][v] = to_rational(w)
            if symmetric:
                mat[v][u] = mat[u][v]
        return cls(mat)

    @classmethod
    def from_unnormalized(cls, valuations: Sequence[Sequence]) -> "Game":
        """Build a game from a matrix with arbitrary diagonal.

        Each row is shifted by its diagonal entry, which leaves every
        player's ranking of coalitions unchanged.
        """
        rows = [[to_rational(x) for x in row] for row in valuations]
        return cls([[x - row[i] for x in row] for i, row in enumerate(rows)])

    # -- views ----------------------------------------------------------------

    def value(self, i: int, j: int) -> Fraction:
        return self.valuations[i][j]

    def singleton_utility(self, i: int) -> Fraction:
        return Fraction(0)

    def utility(self, i: int, coalition: Iterable[int]) -> Fraction:
        members = _as_coalition(coalition, self.n)
        if i not in members:
            raise ValueError(f"player {i} is not in coalition {sorted(members)}")
        row = self.valuations[i]
        return Fraction(sum(row[j] for j in members), len(members))

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        """Neighbour sets of the positive-weight symmetric graph."""
        self.require_symmetric()
        return tuple(
            frozenset(j for j in range(self.n) if self.valuations[i][j] > 0)
            for i in range(self.n)
        )

    @cached_property
    def adjacency_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << j for j in nb) for nb in self.adjacency)

    def edges(self) -> list[tuple[int, int]]:
        adj = self.adjacency
        return [(i, j) for i in range(self.n) for j in sorted(adj[i]) if i < j]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def max_degree(self) -> int:
        return max(len(nb) for nb in self.adjacency)

    def require_symmetric(self) -> None:
        if not self.is_symmetric:
            raise NotSimpleSymmetricError("operation needs a symmetric game")

    def require_simple_symmetric(self) -> None:
        if not (self.is_simple and self.is_symmetric):
            raise NotSimpleSymmetricError(
                "operation needs a simple symmetric game (an undirected graph)"
            )

    def induced(self, players: Sequence[int]) -> "Game":
        """Subgame on ``players``, relabelled ``0..len(players)-1`` in the given order."""
        return Game([[self.valuations[i][j] for j in players] for i in players])

    def __eq__(self, other):
        return isinstance(other, Game) and self.valuations == other.valuations

    def __hash__(self):
        return hash(self.valuations)

    def __repr__(self):
        kind = ("simple " if self.is_simple else "") + (
            "symmetric " if self.is_symmetric else ""
        )
        return f"<{kind}Game n={self.n}>"


class SupportedGame:
    """A game in which some players receive a subsidy when alone.

    A supported player ``i`` with parameter ``l`` gets ``(l - 1) / l`` in
    the singleton coalition ``{i}``; every other utility is the game's.
    """

    def __init__(self, game: Game, subsidies: Mapping[int, int]):
        self.game = game
        subs = {}
        for i, l in subsidies.items():
            if not 0 <= i < game.n:
                raise ValueError(f"supported player {i} outside the game")
            if int(l) != l or l < 2:
                raise ValueError(f"subsidy parameter l={l} for player {i} must be an integer >= 2")
            subs[int(i)] = int(l)
        self.subsidies: dict[int, int] = dict(sorted(subs.items()))

    @property
    def n(self) -> int:
        return self.game.n

    @property
    def is_simple(self) -> bool:
        return self.game.is_simple

    @property
    def is_symmetric(self) -> bool:
        return self.game.is_symmetric

    @property
    def adjacency(self):
        return self.game.adjacency

    @property
    def adjacency_masks(self):
        return self.game.adjacency_masks

    def require_simple_symmetric(self) -> None:
        self.game.require_simple_symmetric()

    def singleton_utility(self, i: int) -> Fraction:
        l = self.subsidies.get(i)
        return Fraction(0) if l is None else Fraction(l - 1, l)

    def utility(self, i: int, coalition: Iterable[int]) -> Fraction:
        members = _as_coalition(coalition, self.n)
        if members == {i}:
            return self.singleton_utility(i)
        return self.game.utility(i, members)

    def __eq__(self, other):
        return (
            isinstance(other, SupportedGame)
            and self.game == other.game
            and self.subsidies == other.subsidies
        )

    def __hash__(self):
        return hash((self.game, tuple(self.subsidies.items())))

    def __repr__(self):
        return f"<SupportedGame n={self.n} supported={len(self.subsidies)}>"


AnyGame = Game | SupportedGame


def base_game(game: AnyGame) -> Game:
    return game.game if isinstance(game, SupportedGame) else game


def _as_coalition(coalition: Iterable[int], n: int) -> frozenset[int]:
    members = frozenset(coalition)
    if not members:
        raise ValueError("coalitions must be nonempty")
    for j in members:
        if not 0 <= j < n:
            raise ValueError(f"player {j} outside 0..{n - 1}")
    return members


class Partition:
    """A partition of ``0..n-1`` into nonempty disjoint coalitions.

    Coalitions are kept as frozensets ordered by their smallest member, so
    equal partitions compare and hash equal regardless of input order.
    """

    __slots__ = ("coalitions", "n", "_owner")

    def __init__(self, coalitions: Iterable[Iterable[int]], n: int | None = None):
        blocks = [frozenset(c) for c in coalitions]
        seen: set[int] = set()
        for block in blocks:
            if not block:
                raise ValueError("empty coalition in partition")
            overlap = seen & block
            if overlap:
                raise ValueError(f"player {min(overlap)} appears in two coalitions")
            seen |= block
        total = len(seen) if n is None else n
        if seen != set(range(total)):
            missing = sorted(set(range(total)) - seen)
            extra = sorted(seen - set(range(total)))
            raise ValueError(
                f"partition does not cover 0..{total - 1} exactly "
                f"(missing {missing[:5]}, unexpected {extra[:5]})"
            )
        blocks.sort(key=min)
        self.coalitions: tuple[frozenset[int], ...] = tuple(blocks)
        self.n = total
        owner = [0] * total
        for k, block in enumerate(blocks):
            for i in block:
                owner[i] = k
        self._owner = tuple(owner)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls([[i] for i in range(n)], n)

    @classmethod
    def grand(cls, n: int) -> "Partition":
        return cls([range(n)], n)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """Partition from a label per player (e.g. a restricted growth string)."""
        groups: dict[int, list[int]] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(lab, []).append(i)
        return cls(groups.values(), len(labels))

    def coalition_of(self, i: int) -> frozenset[int]:
        return self.coalitions[self._owner[i]]

    __call__ = coalition_of

    def labels(self) -> tuple[int, ...]:
        """Restricted growth string of this partition."""
        return self._owner

    def __iter__(self) -> Iterator[frozenset[int]]:
        return iter(self.coalitions)

    def __len__(self) -> int:
        return len(self.coalitions)

    def __eq__(self, other):
        return isinstance(other, Partition) and self.coalitions == other.coalitions

    def __hash__(self):
        return hash(self.coalitions)

    def __repr__(self):
        inner = ", ".join("{" + ", ".join(map(str, sorted(c))) + "}" for c in self.coalitions)
        return f"Partition({inner})"


class TypeSpace:
    """Assignment of players to types, as in Bakers and Millers games."""

    __slots__ = ("assignment", "sizes", "d")

    def __init__(self, assignment: Sequence[int]):
        assignment = tuple(int(t) for t in assignment)
        if not assignment:
            raise ValueError("a type space needs at least one player")
        k = max(assignment) + 1
        sizes = [0] * k
        for t in assignment:
            if t < 0:
                raise ValueError("type indices must be non-negative")
            sizes[t] += 1
        if 0 in sizes:
            raise ValueError(f"type {sizes.index(0)} is empty")
        self.assignment = assignment
        self.sizes = tuple(sizes)
        self.d = reduce(math.gcd, sizes)

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "TypeSpace":
        """Consecutive blocks of players, one block per type."""
        if any(s <= 0 for s in sizes):
            raise ValueError(f"type sizes must be positive, got {tuple(sizes)}")
        return cls([t for t, s in enumerate(sizes) for _ in range(s)])

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def k(self) -> int:
        return len(self.sizes)

    def types(self) -> list[frozenset[int]]:
        out: list[set[int]] = [set() for _ in self.sizes]
        for i, t in enumerate(self.assignment):
            out[t].add(i)
        return [frozenset(s) for s in out]

    def __repr__(self):
        return f"TypeSpace(sizes={self.sizes})"


class Preference(enum.Enum):
    STRICTLY = "strictly"
    INDIFFERENT = "indifferent"
    WORSE = "worse"

    @property
    def weakly(self) -> bool:
        return self is not Preference.WORSE


def utility(game: AnyGame, i: int, coalition: Iterable[int]) -> Fraction:
    """Average value player ``i`` assigns to the members of ``coalition``."""
    return game.utility(i, coalition)


def prefers(game: AnyGame, i: int, s: Iterable[int], t: Iterable[int]) -> Preference:
    """How player ``i`` ranks coalition ``s`` against coalition ``t``."""
    us, ut = game.utility(i, s), game.utility(i, t)
    if us > ut:
        return Preference.STRICTLY
    if us == ut:
        return Preference.INDIFFERENT
    return Preference.WORSE


def is_individually_rational(game: AnyGame, partition: Partition) -> bool:
    return all(
        game.utility(i, partition.coalition_of(i)) >= game.singleton_utility(i)
        for i in range(game.n)
    )


def connected_components(game: AnyGame) -> list[frozenset[int]]:
    """Components of the positive-weight graph of a symmetric game."""
    adj = game.adjacency
    seen = [False] * len(adj)
    comps = []
    for s in range(len(adj)):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [s], deque([s])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(frozenset(comp))
    return comps


def girth(game: AnyGame) -> float:
    """Length of the shortest cycle, ``math.inf`` for forests."""
    game.require_simple_symmetric()
    adj = game.adjacency
    best = math.inf
    for s in range(len(adj)):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] + 1 >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def two_coloring(game: AnyGame) -> list[int] | None:
    """A proper 2-colouring (0/1 per player) or ``None`` if not bipartite."""
    game.require_simple_symmetric()
    adj = game.adjacency
    color = [-1] * len(adj)
    for s in range(len(adj)):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in sorted(adj[u]):
                if color[w] < 0:
                    color[w] = 1 - color[u]
                    queue.append(w)
                elif color[w] == color[u]:
                    return None
    return color


def is_forest(game: AnyGame) -> bool:
    game.require_simple_symmetric()
    edges = sum(len(nb) for nb in game.adjacency) // 2
    return edges == game.n - len(connected_components(game))
