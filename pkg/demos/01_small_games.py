"""Brute force over every partition of a few tiny games.

Six players in two triangles joined by a bridge have exactly one core
partition. A five-player directed cycle and a six-player weighted game
have none, and the five-cycle has no strict-core partition either.
"""
from fhg import Kind, enumerate_partitions, gadget, stable_partitions

for name in ("fig2-6", "digraph-5", "symmetric-6"):
    g = gadget(name)
    total = sum(1 for _ in enumerate_partitions(g.n))
    stable = list(stable_partitions(g))
    print(f"{name}: {total} partitions, {len(stable)} in the core")
    for p in stable:
        print("   ", p)

c5 = gadget("c5")
print("c5 strict core:", list(stable_partitions(c5, Kind.WEAK)) or "empty")
print("c5 core, first few:", list(stable_partitions(c5))[:3])
