"""Polynomial-time constructions of core-stable partitions for special graph classes.

All greedy choices (triangle and edge order, BFS roots, move scanning) go
by ascending player id, so every solver is deterministic.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .model import Game, Partition, TypeSpace, connected_components, girth, is_forest, two_coloring

__all__ = [
    "PreconditionError",
    "NotBipartiteError",
    "NoPerfectMatchingError",
    "solve_degree2",
    "solve_forest",
    "solve_bakers_millers_finest",
    "check_bakers_millers_strict_core",
    "maximum_matching",
    "solve_bipartite_matching",
    "solve_regular_bipartite",
    "Star",
    "StarPacking",
    "MoveRecord",
    "StarPackingResult",
    "objective_vector",
    "leximin_compare",
    "phi_potential",
    "initial_star_packing",
    "star_packing_local_search",
    "solve_star_packing",
]


class PreconditionError(ValueError):
    """The input is outside the graph class a solver is guaranteed for."""


class NotBipartiteError(PreconditionError):
    pass


class NoPerfectMatchingError(PreconditionError):
    def __init__(self, matched: int, n: int):
        super().__init__(f"maximum matching covers {matched} of {n} players; no perfect matching")
        self.matched = matched
        self.n = n


def _require_graph(game: Game) -> None:
    if not (game.is_simple and game.is_symmetric):
        raise PreconditionError("solver needs a simple symmetric game (an undirected graph)")


# ---------------------------------------------------------------------------
# degree at most two


def solve_degree2(game: Game) -> Partition:
    """Greedily take triangles, then edges, then leave singletons."""
    _require_graph(game)
    if game.n and game.max_degree > 2:
        raise PreconditionError(f"maximum degree is {game.max_degree}, expected at most 2")
    adj = game.adjacency
    free = [True] * game.n
    blocks = []
    for i in range(game.n):
        for j in sorted(adj[i]):
            for k in sorted(adj[i]):
                if i < j < k and k in adj[j] and free[i] and free[j] and free[k]:
                    blocks.append((i, j, k))
                    free[i] = free[j] = free[k] = False
    for i, j in game.edges():
        if free[i] and free[j]:
            blocks.append((i, j))
            free[i] = free[j] = False
    blocks += [(i,) for i in range(game.n) if free[i]]
    return Partition(blocks, game.n)


# ---------------------------------------------------------------------------
# forests


def _bfs_tree(adj: Sequence[Iterable[int]], root: int, allowed: set[int] | None = None):
    parent = {root: None}
    depth = {root: 0}
    order = [root]
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in sorted(adj[u]):
            if w not in depth and (allowed is None or w in allowed):
                parent[w] = u
                depth[w] = depth[u] + 1
                order.append(w)
                queue.append(w)
    return parent, depth, order


def _layer_grouping(parent: dict, depth: dict) -> tuple[list[tuple[int, list[int]]], int | None]:
    """Bottom-up grouping of a rooted tree into (center, children) stars.

    Returns the groups and the root if it was left alone.
    """
    remaining = set(parent)
    groups = []
    max_depth = max(depth.values())
    for d in range(max_depth, 0, -1):
        by_parent: dict[int, list[int]] = {}
        for v in sorted(remaining):
            if depth[v] == d:
                by_parent.setdefault(parent[v], []).append(v)
        for p in sorted(by_parent):
            kids = by_parent[p]
            groups.append((p, kids))
            remaining.discard(p)
            remaining.difference_update(kids)
    lone = next(iter(remaining)) if remaining else None
    return groups, lone


def solve_forest(game: Game) -> Partition:
    """Core-stable partition of a forest by layered BFS grouping, per component."""
    _require_graph(game)
    if not is_forest(game):
        raise PreconditionError("graph contains a cycle")
    adj = game.adjacency
    blocks: list[set[int]] = []
    for comp in connected_components(game):
        root = min(comp)
        parent, depth, _ = _bfs_tree(adj, root)
        groups, lone = _layer_grouping(parent, depth)
        comp_blocks = [{p, *kids} for p, kids in groups]
        if lone is not None:
            if not adj[lone]:
                comp_blocks.append({lone})
            else:
                owner = {v: b for b in comp_blocks for v in b}
                target = min(sorted(adj[lone]), key=lambda w: len(owner[w]))
                owner[target].add(lone)
        blocks += comp_blocks
    return Partition(blocks, game.n)


# ---------------------------------------------------------------------------
# Bakers and Millers


def solve_bakers_millers_finest(types: TypeSpace) -> Partition:
    """The finest strict-core partition: ``d`` coalitions, each with ``|theta|/d`` of every type."""
    d = types.d
    members = [sorted(t) for t in types.types()]
    blocks = []
    for r in range(d):
        block = []
        for group in members:
            share = len(group) // d
            block += group[r * share:(r + 1) * share]
        blocks.append(block)
    return Partition(blocks, types.n)


def check_bakers_millers_strict_core(types: TypeSpace, partition: Partition) -> bool:
    """True iff every type makes up the same fraction of every coalition.

    Equal fractions across coalitions must all equal the type's overall
    share, which turns the test into integer cross-multiplication.
    """
    n = types.n
    kinds = types.types()
    return all(
        len(block & t) * n == len(t) * len(block)
        for block in partition
        for t in kinds
    )


# ---------------------------------------------------------------------------
# bipartite graphs


def maximum_matching(game: Game) -> dict[int, int]:
    """Maximum matching of a bipartite graph: greedy pass, then augmenting paths.

    Returns a symmetric mate map (both endpoints are keys).
    """
    _require_graph(game)
    color = two_coloring(game)
    if color is None:
        raise NotBipartiteError("graph is not bipartite")
    adj = game.adjacency
    mate: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for w in sorted(adj[u]):
            if w in seen:
                continue
            seen.add(w)
            if w not in mate or augment(mate[w], seen):
                mate[w] = u
                mate[u] = w
                return True
        return False

    # greedy warm start, then augment from whatever is still free
    for u in range(game.n):
        if color[u] == 0:
            free = [w for w in sorted(adj[u]) if w not in mate]
            if free:
                mate[u], mate[free[0]] = free[0], u
    for u in range(game.n):
        if color[u] == 0 and u not in mate:
            augment(u, set())
    return mate


def solve_bipartite_matching(game: Game) -> Partition:
    """A perfect matching as a partition into pairs; every player gets 1/2."""
    mate = maximum_matching(game)
    if len(mate) < game.n:
        raise NoPerfectMatchingError(len(mate), game.n)
    return Partition({frozenset((u, w)) for u, w in mate.items()}, game.n)


def solve_regular_bipartite(game: Game) -> Partition:
    """Perfect matching of a k-regular bipartite graph (k >= 1), which always exists."""
    _require_graph(game)
    degrees = {len(nb) for nb in game.adjacency}
    if len(degrees) != 1 or degrees == {0}:
        raise PreconditionError(f"graph is not k-regular for k >= 1 (degrees {sorted(degrees)})")
    return solve_bipartite_matching(game)


# ---------------------------------------------------------------------------
# star packings for girth >= 5


@dataclass(frozen=True)
class Star:
    """A star; an edge (two vertices) counts as two centers and no leaves."""

    centers: frozenset[int]
    leaves: frozenset[int]

    @property
    def members(self) -> frozenset[int]:
        return self.centers | self.leaves

    @property
    def center(self) -> int:
        if len(self.centers) != 1:
            raise ValueError("an edge star has two centers")
        return next(iter(self.centers))

    @classmethod
    def make(cls, center: int, leaves: Iterable[int]) -> "Star":
        leaves = frozenset(leaves)
        if len(leaves) == 1:
            return cls(frozenset([center]) | leaves, frozenset())
        return cls(frozenset([center]), leaves)

    def without(self, leaf: int) -> "Star":
        return Star.make(self.center, self.leaves - {leaf})


@dataclass(frozen=True)
class StarPacking:
    stars: tuple[Star, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "stars", tuple(sorted(self.stars, key=lambda s: min(s.members))))

    @property
    def unpacked(self) -> list[int]:
        covered = set().union(*(s.members for s in self.stars)) if self.stars else set()
        return [v for v in range(self.n) if v not in covered]

    @property
    def centers(self) -> set[int]:
        return set().union(*(s.centers for s in self.stars)) if self.stars else set()

    @property
    def leaves(self) -> set[int]:
        return set().union(*(s.leaves for s in self.stars)) if self.stars else set()

    def partition(self) -> Partition:
        return Partition([s.members for s in self.stars] + [[v] for v in self.unpacked], self.n)

    def star_of(self) -> dict[int, int]:
        return {v: k for k, s in enumerate(self.stars) for v in s.members}

    def is_valid(self, game: Game) -> bool:
        adj = game.adjacency
        seen: set[int] = set()
        for s in self.stars:
            if seen & s.members:
                return False
            seen |= s.members
            if s.leaves:
                if len(s.centers) != 1 or len(s.leaves) < 2:
                    return False
                if not all(leaf in adj[s.center] for leaf in s.leaves):
                    return False
            else:
                a, b = sorted(s.centers)
                if len(s.centers) != 2 or b not in adj[a]:
                    return False
        return True

    def covers_non_isolated(self, game: Game) -> bool:
        return all(not game.adjacency[v] for v in self.unpacked)

    @classmethod
    def from_partition(cls, game: Game, partition: Partition) -> "StarPacking":
        adj = game.adjacency
        stars = []
        for block in partition:
            if len(block) == 1:
                continue
            hubs = [v for v in sorted(block) if block - {v} <= adj[v]]
            if not hubs:
                raise ValueError(f"coalition {sorted(block)} is not a star")
            stars.append(Star.make(hubs[0], block - {hubs[0]}))
        return cls(tuple(stars), game.n)


def objective_vector(game: Game, partition: Partition) -> tuple[Fraction, ...]:
    """Players' utilities in ascending order."""
    return tuple(sorted(game.utility(i, partition.coalition_of(i)) for i in range(game.n)))


def leximin_compare(a: Sequence[Fraction], b: Sequence[Fraction]) -> int:
    """Compare ascending-sorted utility vectors lexicographically: 1, 0 or -1."""
    if len(a) != len(b):
        raise ValueError(f"objective vectors differ in length ({len(a)} vs {len(b)})")
    a, b = tuple(sorted(a)), tuple(sorted(b))
    return (a > b) - (a < b)


def phi_potential(packing: StarPacking, n: int | None = None) -> int:
    """Centers count ``n`` each; a leaf counts ``n`` minus the size of its star."""
    n = packing.n if n is None else n
    total = 0
    for s in packing.stars:
        total += n * len(s.centers) + (n - len(s.members)) * len(s.leaves)
    return total


def initial_star_packing(game: Game) -> StarPacking:
    """Star packing covering every non-isolated vertex, built from a BFS spanning forest."""
    adj = game.adjacency
    stars: list[Star] = []
    for comp in connected_components(game):
        if len(comp) == 1:
            continue
        root = min(comp)
        parent, depth, _ = _bfs_tree(adj, root)
        groups, lone = _layer_grouping(parent, depth)
        comp_stars = [Star.make(p, kids) for p, kids in groups]
        if lone is not None:
            comp_stars = _attach_lone(adj, comp_stars, lone)
        stars += comp_stars
    return StarPacking(tuple(stars), game.n)


def _attach_lone(adj, stars: list[Star], v: int) -> list[Star]:
    for w in sorted(adj[v]):
        for k, s in enumerate(stars):
            if w in s.centers:
                if s.leaves:
                    stars[k] = Star(s.centers, s.leaves | {v})
                else:
                    stars[k] = Star(frozenset([w]), (s.centers - {w}) | {v})
                return stars
    for w in sorted(adj[v]):
        for k, s in enumerate(stars):
            if w in s.leaves:
                stars[k] = s.without(w)
                stars.append(Star.make(v, [w]))
                return stars
    raise AssertionError(f"vertex {v} has no star to join")


@dataclass
class MoveRecord:
    kind: str  # "a": two leaves form an edge star; "b": a leaf changes star
    vertices: tuple[int, ...]
    phi_before: int
    phi_after: int
    objective_before: tuple[Fraction, ...]
    objective_after: tuple[Fraction, ...]


@dataclass
class StarPackingResult:
    packing: StarPacking
    moves: list[MoveRecord] = field(default_factory=list)

    @property
    def partition(self) -> Partition:
        return self.packing.partition()


def _pair_move(packing: StarPacking, owner: dict[int, int], l1: int, l2: int) -> StarPacking:
    stars = list(packing.stars)
    k1, k2 = owner[l1], owner[l2]
    stars[k1] = stars[k1].without(l1)
    stars[k2] = stars[k2].without(l2)
    stars.append(Star(frozenset((l1, l2)), frozenset()))
    return StarPacking(tuple(stars), packing.n)


def _leaf_move(packing: StarPacking, owner: dict[int, int], leaf: int, target: int, hub: int) -> StarPacking:
    stars = list(packing.stars)
    src = owner[leaf]
    stars[src] = stars[src].without(leaf)
    t = stars[target]
    stars[target] = Star.make(hub, t.members - {hub} | {leaf})
    return StarPacking(tuple(stars), packing.n)


def _candidate_moves(game: Game, packing: StarPacking):
    adj = game.adjacency
    owner = packing.star_of()
    leaves = sorted(packing.leaves)
    leaf_set = set(leaves)
    for l1 in leaves:
        for l2 in sorted(adj[l1]):
            if l2 > l1 and l2 in leaf_set and owner[l1] != owner[l2]:
                yield "a", (l1, l2), lambda l1=l1, l2=l2: _pair_move(packing, owner, l1, l2)
    for leaf in leaves:
        for k, s in enumerate(packing.stars):
            if k == owner[leaf]:
                continue
            hubs = sorted(c for c in s.centers if c in adj[leaf])
            if hubs:
                yield "b", (leaf, k), lambda leaf=leaf, k=k, hub=hubs[0]: _leaf_move(packing, owner, leaf, k, hub)


def star_packing_local_search(
    game: Game,
    start: StarPacking | None = None,
    *,
    force: bool = False,
    max_moves: int | None = None,
) -> StarPackingResult:
    """Improve a star packing by leximin-better moves until none applies.

    Moves are (a) two adjacent leaves of different stars leave and pair up,
    (b) a leaf moves to another star whose center it is adjacent to.  The
    first improving move in scan order is taken.
    """
    _require_graph(game)
    if not force and girth(game) < 5:
        raise PreconditionError(f"girth is {girth(game)}, expected at least 5 (pass force=True to run anyway)")
    packing = start if start is not None else initial_star_packing(game)
    if not packing.is_valid(game):
        raise ValueError("start is not a star packing of this graph")
    moves: list[MoveRecord] = []
    current = objective_vector(game, packing.partition())
    while max_moves is None or len(moves) < max_moves:
        for kind, verts, build in _candidate_moves(game, packing):
            cand = build()
            vec = objective_vector(game, cand.partition())
            if leximin_compare(vec, current) > 0:
                if kind == "b":
                    verts = (verts[0], min(packing.stars[verts[1]].members))
                moves.append(MoveRecord(kind, verts, phi_potential(packing), phi_potential(cand), current, vec))
                packing, current = cand, vec
                break
        else:
            break
    return StarPackingResult(packing, moves)


def solve_star_packing(game: Game, *, force: bool = False) -> Partition:
    """Core-stable partition into stars for graphs of girth at least five."""
    return star_packing_local_search(game, force=force).partition
