"""The forty-player ring of cliques.

Deleting one B2 player leaves a 39-player game whose drawn partition can
be certified stable by the connected search. Restoring the player breaks
it: every improvement walk on the full game ends up going round in a cycle.
"""
import random

from fhg import SearchBudget, deviation_walk, gadget_info, is_core_stable
from fhg.model import Partition

info = gadget_info("remark1-39")
rep = is_core_stable(info.game, info.partition, SearchBudget(max_coalition_size=17, connected_only=True))
print(f"39 players: {rep.verdict.value} after {rep.nodes} search nodes ({rep.method})")

full = gadget_info("empty-core-40").game
rng = random.Random(1)
for trial in range(5):
    start = Partition.from_labels([rng.randrange(6) for _ in range(full.n)])
    walk = deviation_walk(full, start, max_steps=5000)
    print(f"walk {trial}: {walk.reason} after {walk.steps} steps, cycle entered at step {walk.cycle_start}")

last = walk.trace[-1]
print("last blocking coalition:", sorted(last.coalition))
for player, before, after in last.member_deltas:
    print(f"  player {player}: {before} -> {after}")
