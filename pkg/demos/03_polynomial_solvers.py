"""Graph classes where a core partition can be built directly."""
from fhg import (
    Game,
    TypeSpace,
    is_core_stable,
    is_strict_core_stable,
    solve_bakers_millers_finest,
    solve_bipartite_matching,
    solve_degree2,
    solve_forest,
)
from fhg.instances import bakers_millers_graph


def show(label, game, partition, check=is_core_stable):
    print(f"{label:<16} {partition}  -> {check(game, partition).verdict.value}")


cycle7 = Game.from_edges(7, [(i, (i + 1) % 7) for i in range(7)])
show("7-cycle", cycle7, solve_degree2(cycle7))

tree = Game.from_edges(9, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (5, 6), (5, 7), (7, 8)])
show("tree", tree, solve_forest(tree))

cube = Game.from_edges(8, [(0, 1), (0, 2), (0, 4), (1, 3), (1, 5), (2, 3), (2, 6), (3, 7), (4, 5), (4, 6), (5, 7), (6, 7)])
show("cube", cube, solve_bipartite_matching(cube))

# two bakers and four millers: each coalition keeps the 1:2 ratio
types = TypeSpace.from_sizes([2, 4])
show("bakers/millers", bakers_millers_graph(types), solve_bakers_millers_finest(types), is_strict_core_stable)
