"""Local search over star packings on a girth-five graph.

Each move raises the sorted utility vector. The potential that counts
centers and leaves usually rises too, but a leaf leaving a four-star to
join a two-player star leaves it unchanged; the total of squared star
sizes still drops in that case.
"""
from fhg import gadget_info, is_core_stable
from fhg.model import Game
from fhg.solvers import Star, StarPacking, star_packing_local_search

info = gadget_info("fig6-star")
g = info.game
res = star_packing_local_search(g, StarPacking.from_partition(g, info.partition))
for mv in res.moves:
    print(f"move {mv.kind} on {mv.vertices}: potential {mv.phi_before} -> {mv.phi_after}")
print("final:", res.partition, "->", is_core_stable(g, res.partition).verdict.value)

# the flat case
g = Game.from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 4), (4, 5)])
start = StarPacking((Star.make(0, [1, 2, 3]), Star(frozenset({4, 5}), frozenset())), 6)
mv = star_packing_local_search(g, start, max_moves=1).moves[0]
print(f"\nflat move {mv.kind} on {mv.vertices}: potential {mv.phi_before} -> {mv.phi_after}")
print("  sorted utilities", [str(x) for x in mv.objective_before], "->", [str(x) for x in mv.objective_after])
