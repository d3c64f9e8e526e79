"""Hardness gadgets: subsidy removal, clique checks and the grid instance."""
import random

from fhg import Game, SupportedGame, core_nonempty_exhaustive, reduce_maxmin_clique, reduce_supported
from fhg.instances import GridCliqueInstance, clique_verification_gadget
from fhg.stability import find_blocking

sg = SupportedGame(Game.from_edges(3, [(0, 1), (1, 2)]), {0: 4})
red, back = reduce_supported(sg)
print(f"subsidised path: {sg.n} players -> {red.n} after adding helpers {back.helpers}")
p = core_nonempty_exhaustive(sg)
print("  core partition:", p, "maps to", back.forward(p))
print("  reduced game core non-empty:", core_nonempty_exhaustive(red) is not None)

tri = Game.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
gad, part = clique_verification_gadget(tri, 3)
cert = find_blocking(gad, part).certificate
print("\ntriangle found by the blocking search:", sorted(cert.coalition))

rng = random.Random(0)
edges = [(u, v) for u in range(8) for v in range(u + 1, 8) if rng.random() < 0.5]
sg, lay = reduce_maxmin_clique(GridCliqueInstance(Game.from_edges(8, edges), 2, 2))
print(f"\n2x2 grid of 2-vertex cells -> {sg.n} players, big M = {lay.big_m}, {len(sg.subsidies)} subsidised")
