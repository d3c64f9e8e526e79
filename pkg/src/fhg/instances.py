"""Named gadget games and executable versions of the hardness reductions.

Player numbering is 0-based here; the documented 1-based labels are what
the file formats and CLI print.

Ring gadget layout (``empty-core-40``): ``A_1..A_5`` are players 0-14
(three each), ``B_1..B_5`` are 15-24 (two each) and ``C_1..C_5`` are 25-39
(three each).  ``A_l`` is joined to ``C_l``, ``B_l`` and ``B_{l-1}``;
``C_l`` is joined to ``B_{l-2}`` (indices mod 5).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .model import Game, Partition, SupportedGame, TypeSpace

__all__ = [
    "SupportedGame",
    "GadgetInfo",
    "GADGETS",
    "gadget",
    "gadget_info",
    "ring_gadget",
    "bakers_millers_graph",
    "ReductionMap",
    "reduce_supported",
    "GridCliqueInstance",
    "MaxminLayout",
    "reduce_maxmin_clique",
    "clique_verification_gadget",
]


@dataclass
class GadgetInfo:
    name: str
    game: Game
    description: str
    partition: Partition | None = None
    groups: dict[str, list[int]] = field(default_factory=dict)


def _complete(block_a: Sequence[int], block_b: Sequence[int] | None = None):
    if block_b is None:
        return list(itertools.combinations(block_a, 2))
    return [(u, v) for u in block_a for v in block_b]


def ring_gadget(b_sizes: Sequence[int] = (2, 2, 2, 2, 2)) -> tuple[Game, dict[str, list[int]]]:
    """The five-fold clique ring with empty core, optionally with shrunk ``B`` cliques.

    Returns the game and a map from group name (``"A1"``, ``"B3"``, ...) to
    its players.
    """
    groups: dict[str, list[int]] = {}
    nxt = 0
    for name, sizes in (("A", [3] * 5), ("B", list(b_sizes)), ("C", [3] * 5)):
        for l, size in enumerate(sizes, start=1):
            groups[f"{name}{l}"] = list(range(nxt, nxt + size))
            nxt += size
    edges = []
    for block in groups.values():
        edges += _complete(block)
    for l in range(1, 6):
        prev, prev2 = (l - 2) % 5 + 1, (l - 3) % 5 + 1
        a, c = groups[f"A{l}"], groups[f"C{l}"]
        edges += _complete(a, c)
        edges += _complete(a, groups[f"B{l}"])
        edges += _complete(a, groups[f"B{prev}"])
        edges += _complete(c, groups[f"B{prev2}"])
    return Game.from_edges(nxt, edges), groups


def _bridged_triangles() -> GadgetInfo:
    edges = [(1, 2), (1, 4), (2, 3), (2, 5), (4, 5), (6, 5), (6, 3), (3, 1), (4, 6)]
    game = Game.from_edges(6, [(u - 1, v - 1) for u, v in edges])
    return GadgetInfo(
        "fig2-6", game, "six-player prism; unique core partition {1,2,3},{4,5,6}",
        Partition([[0, 1, 2], [3, 4, 5]], 6),
    )


def _digraph5() -> GadgetInfo:
    # arc i -> j carries v_i(j); drawn labels read clockwise 1,2,3,4,5
    ones = [(1, 5), (5, 4), (4, 3), (3, 2), (2, 1)]
    twos = [(1, 2), (5, 1), (4, 5), (3, 4), (2, 3)]
    arcs = [(u - 1, v - 1, 1) for u, v in ones] + [(u - 1, v - 1, 2) for u, v in twos]
    game = Game.from_weights(5, arcs, default=-10)
    return GadgetInfo("digraph-5", game, "weighted digraph with empty core; missing arcs -10")


def _symmetric6() -> GadgetInfo:
    weighted = [(1, 2, 7), (1, 3, 5), (2, 3, 6), (3, 4, 7), (3, 5, 5),
                (4, 5, 6), (5, 6, 7), (5, 1, 5), (6, 1, 6)]
    game = Game.from_weights(6, [(u - 1, v - 1, w) for u, v, w in weighted], default=-24, symmetric=True)
    return GadgetInfo("symmetric-6", game, "symmetric weighted game with empty core; missing edges -24")


def _cycle(n: int) -> Game:
    return Game.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def _c5() -> GadgetInfo:
    return GadgetInfo("c5", _cycle(5), "5-cycle: nonempty core, empty strict core")


def _empty40() -> GadgetInfo:
    game, groups = ring_gadget()
    return GadgetInfo("empty-core-40", game, "simple symmetric game with empty core", None, groups)


def _ring_minus_one() -> GadgetInfo:
    game, groups = ring_gadget((2, 1, 2, 2, 2))
    g = groups
    pi = Partition(
        [g["A1"] + g["B1"] + g["B5"]]
        + [g[f"A{l}"] + g[f"C{l}"] for l in range(2, 6)]
        + [g["B4"] + g["C1"], g["B2"], g["B3"]],
        game.n,
    )
    return GadgetInfo("remark1-39", game, "ring gadget with |B2| = 1 and a core partition", pi, groups)


def _social15() -> GadgetInfo:
    idx = {f"{k}{l}": 5 * j + l - 1 for j, k in enumerate("abc") for l in range(1, 6)}
    weights = {}
    for l in range(1, 6):
        prev, prev2 = (l - 2) % 5 + 1, (l - 3) % 5 + 1
        weights[(idx[f"a{l}"], idx[f"c{l}"])] = 5
        weights[(idx[f"a{l}"], idx[f"b{l}"])] = 4
        weights[(idx[f"a{l}"], idx[f"b{prev}"])] = 4
        weights[(idx[f"c{l}"], idx[f"b{prev2}"])] = 4
    game = Game.from_weights(15, weights, symmetric=True)
    groups = {name: [i] for name, i in idx.items()}
    return GadgetInfo("social-15", game, "social symmetric 15-player game with empty core (unverified)", None, groups)


def _k4_10() -> GadgetInfo:
    game = bakers_millers_graph(TypeSpace.from_sizes((4, 10)))
    a, b, c, d = range(4)
    right = [4 + x for x in range(10)]
    packing = Partition(
        [[a, right[0], right[1]], [b, right[2], right[3]],
         [c, right[4], right[5], right[6]], [d, right[7], right[8], right[9]]], 14,
    )
    groups = {"centers": [a, b, c, d], "right": right,
              "deviation": [a, b] + [right[x] for x in (4, 5, 6, 7, 8)]}
    return GadgetInfo("k4-10", game, "K_{4,10}: no star packing is core stable", packing, groups)


def _girth5_star_example() -> GadgetInfo:
    names = ["c1", "l1", "l2", "c2", "l3", "l4", "l5", "c3", "l6", "l7", "l8"]
    ix = {s: i for i, s in enumerate(names)}
    pairs = [("c1", "l1"), ("c1", "l2"), ("c2", "l3"), ("c2", "l4"), ("c2", "l5"),
             ("c3", "l6"), ("c3", "l7"), ("c3", "l8"),
             ("l2", "c2"), ("l4", "c3"), ("c3", "c1"), ("l3", "l8")]
    game = Game.from_edges(11, [(ix[u], ix[v]) for u, v in pairs])
    packing = Partition([[0, 1, 2], [3, 4, 5, 6], [7, 8, 9, 10]], 11)
    return GadgetInfo("fig6-star", game, "girth-5 graph with an improvable star packing", packing,
                      {s: [i] for s, i in ix.items()})


def _petersen() -> GadgetInfo:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return GadgetInfo("petersen", Game.from_edges(10, edges), "Petersen graph (girth 5)")


def _bm3() -> GadgetInfo:
    game = bakers_millers_graph(TypeSpace([0, 1, 1]))
    return GadgetInfo("bakers-millers-3", game, "types {1} and {2,3}: {1,2},{3} is core but not strict core",
                      Partition([[0, 1], [2]], 3))


GADGETS: dict[str, Callable[[], GadgetInfo]] = {
    "fig2-6": _bridged_triangles,
    "digraph-5": _digraph5,
    "symmetric-6": _symmetric6,
    "c5": _c5,
    "empty-core-40": _empty40,
    "remark1-39": _ring_minus_one,
    "social-15": _social15,
    "k4-10": _k4_10,
    "fig6-star": _girth5_star_example,
    "petersen": _petersen,
    "bakers-millers-3": _bm3,
}


def gadget_info(name: str) -> GadgetInfo:
    try:
        return GADGETS[name]()
    except KeyError:
        raise KeyError(f"unknown gadget {name!r}; available: {', '.join(GADGETS)}") from None


def gadget(name: str) -> Game:
    return gadget_info(name).game


def bakers_millers_graph(types: TypeSpace) -> Game:
    """Complete multipartite graph whose parts are the types."""
    a = types.assignment
    n = len(a)
    return Game.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n) if a[i] != a[j]])


# ---------------------------------------------------------------------------
# removing subsidies


@dataclass
class ReductionMap:
    """Partition correspondence between a supported game and its plain reduction."""

    n_original: int
    n_reduced: int
    helpers: dict[int, tuple[int, ...]]  # supported player -> its added clique mates

    def forward(self, partition: Partition) -> Partition:
        """Supported singleton ``{i}`` becomes ``C_i + {i}``; otherwise ``C_i`` stands alone."""
        blocks = []
        for block in partition:
            if len(block) == 1 and next(iter(block)) in self.helpers:
                continue
            blocks.append(block)
        for i, mates in self.helpers.items():
            if frozenset([i]) in partition.coalitions:
                blocks.append(frozenset(mates) | {i})
            else:
                blocks.append(frozenset(mates))
        return Partition(blocks, self.n_reduced)

    def backward(self, partition: Partition) -> Partition:
        """Restrict to the original players (``C_i + {i}`` maps back to ``{i}``)."""
        blocks = [block & frozenset(range(self.n_original)) for block in partition]
        return Partition([b for b in blocks if b], self.n_original)


def reduce_supported(sg: SupportedGame) -> tuple[Game, ReductionMap]:
    """Replace each subsidy ``l`` by a clique of ``l - 1`` fresh players around its owner."""
    game = sg.game
    game.require_simple_symmetric()
    for i, l in sg.subsidies.items():
        if l < 4:
            raise ValueError(f"player {i} has l={l}; the subsidy gadget needs l >= 4")
    edges = game.edges()
    nxt = game.n
    helpers = {}
    for i, l in sg.subsidies.items():
        mates = tuple(range(nxt, nxt + l - 1))
        nxt += l - 1
        helpers[i] = mates
        edges += _complete((i,) + mates)
    return Game.from_edges(nxt, edges), ReductionMap(game.n, nxt, helpers)


# ---------------------------------------------------------------------------
# MAXMIN-CLIQUE


@dataclass
class GridCliqueInstance:
    """Graph on ``2 * rows * m`` vertices laid out in a rows-by-2 grid of cells.

    Cell ``(i, j)`` holds vertices ``(2 i + j) m .. (2 i + j + 1) m - 1``.
    """

    graph: Game
    rows: int
    m: int

    def __post_init__(self):
        self.graph.require_simple_symmetric()
        if self.graph.n != 2 * self.rows * self.m:
            raise ValueError(f"graph has {self.graph.n} vertices, grid needs {2 * self.rows * self.m}")
        if (self.rows * self.m) % 2:
            raise ValueError("rows * m must be even so the target clique size is integral")

    @property
    def k(self) -> int:
        return self.rows + self.rows * self.m // 2

    def cell(self, i: int, j: int) -> list[int]:
        start = (2 * i + j) * self.m
        return list(range(start, start + self.m))


@dataclass
class MaxminLayout:
    big_m: int
    vertices: list[int]
    mates: dict[int, int]
    z: list[int]
    x: dict[tuple[int, int], list[int]]
    c: dict[int, list[int]]
    o_z: list[list[int]]
    o_mate: dict[int, list[int]]


def _attach_ring(edges: list, distinguished: int, start: int) -> tuple[list[int], int]:
    """Add 39 fresh players forming the ring gadget with ``distinguished`` in ``B_2``."""
    ring, groups = ring_gadget()
    slot = groups["B2"][0]
    fresh = iter(range(start, start + 39))
    relabel = {p: (distinguished if p == slot else next(fresh)) for p in range(ring.n)}
    edges += [(relabel[u], relabel[v]) for u, v in ring.edges()]
    return [relabel[p] for p in range(ring.n) if p != slot], start + 39


def reduce_maxmin_clique(inst: GridCliqueInstance) -> tuple[SupportedGame, MaxminLayout]:
    """Supported game whose core is nonempty iff the grid instance is a yes-instance."""
    k, m, rows = inst.k, inst.m, inst.rows
    if k < 4:
        raise ValueError(f"target clique size k={k} must be at least 4")
    big_m = 20 * m * m * rows
    nv = inst.graph.n
    vertices = list(range(nv))
    edges = list(inst.graph.edges())
    nxt = nv
    mates = {v: nxt + v for v in vertices}
    nxt += nv
    z = list(range(nxt, nxt + rows))
    nxt += rows
    x: dict[tuple[int, int], list[int]] = {}
    for i in range(rows):
        for j in range(2):
            x[(i, j)] = list(range(nxt, nxt + big_m))
            nxt += big_m
    c: dict[int, list[int]] = {}
    for v in vertices:
        c[v] = list(range(nxt, nxt + k - 3))
        nxt += k - 3
    for v in vertices:
        edges += _complete(c[v] + [v, mates[v]])
    for i in range(rows):
        for j in range(2):
            xs = x[(i, j)]
            edges += _complete(xs + [z[i]])
            for v in inst.cell(i, j):
                edges += _complete([v, mates[v]], xs)
    o_z = []
    for i in range(rows):
        block, nxt = _attach_ring(edges, z[i], nxt)
        o_z.append(block)
    o_mate = {}
    for v in vertices:
        block, nxt = _attach_ring(edges, mates[v], nxt)
        o_mate[v] = block
    subsidies = {p: big_m + 2 * m + 1 for xs in x.values() for p in xs}
    subsidies.update({p: k - 1 for cs in c.values() for p in cs})
    sg = SupportedGame(Game.from_edges(nxt, edges), subsidies)
    return sg, MaxminLayout(big_m, vertices, mates, z, x, c, o_z, o_mate)


def clique_verification_gadget(graph: Game, k: int) -> tuple[SupportedGame, Partition]:
    """Support every vertex with ``(k-2)/(k-1)``; all-singletons is core iff no ``k``-clique."""
    if k < 3:
        raise ValueError("clique size k must be at least 3")
    graph.require_simple_symmetric()
    sg = SupportedGame(graph, {i: k - 1 for i in range(graph.n)})
    return sg, Partition.singletons(graph.n)
