"""Core and strict-core verification, blocking certificates and deviation walks.

Two search engines back :func:`find_blocking`:

* an exhaustive all-subsets oracle, vectorised with numpy over integer
  numerators/denominators so comparisons stay exact;
* a branch-and-bound over connected coalitions for simple symmetric games
  (with or without singleton subsidies).  If any coalition blocks, some
  connected one does, so a complete connected search proves stability.
"""
from __future__ import annotations

import enum
import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .model import AnyGame, Game, Partition, SupportedGame, base_game

__all__ = [
    "Kind",
    "Verdict",
    "BlockingCertificate",
    "SearchBudget",
    "SearchResult",
    "StabilityReport",
    "WalkResult",
    "find_blocking",
    "find_all_blocking",
    "is_core_stable",
    "is_strict_core_stable",
    "blocks",
    "restricted_growth_strings",
    "enumerate_partitions",
    "stable_partitions",
    "core_nonempty_exhaustive",
    "deviation_walk",
    "max_exhaustive_players",
]

#: Default bound for exhaustive partition enumeration (Bell(13) ~ 2.8e7).
max_exhaustive_players = 13
# Largest player count for which the dense subset table is built.
_DENSE_SUBSETS = 16


class Kind(enum.Enum):
    STRONG = "strong"
    WEAK = "weak"


class Verdict(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class BlockingCertificate:
    """A coalition together with each member's utility before and after."""

    coalition: frozenset[int]
    kind: Kind
    member_deltas: tuple[tuple[int, Fraction, Fraction], ...]

    @classmethod
    def build(cls, game: AnyGame, partition: Partition, coalition: Iterable[int], kind: Kind):
        members = frozenset(coalition)
        deltas = tuple(
            (i, game.utility(i, partition.coalition_of(i)), game.utility(i, members))
            for i in sorted(members)
        )
        return cls(members, kind, deltas)

    @property
    def min_gain(self) -> Fraction:
        return min(after - before for _, before, after in self.member_deltas)

    def verify(self, game: AnyGame, partition: Partition) -> bool:
        """Recompute every delta from scratch and check the blocking condition."""
        if not self.coalition:
            return False
        fresh = BlockingCertificate.build(game, partition, self.coalition, self.kind)
        if fresh.member_deltas != self.member_deltas:
            return False
        return blocks(game, partition, self.coalition, self.kind)


def blocks(game: AnyGame, partition: Partition, coalition: Iterable[int], kind: Kind = Kind.STRONG) -> bool:
    members = frozenset(coalition)
    gains = [
        game.utility(i, members) - game.utility(i, partition.coalition_of(i))
        for i in members
    ]
    if kind is Kind.STRONG:
        return all(g > 0 for g in gains)
    return all(g >= 0 for g in gains) and any(g > 0 for g in gains)


@dataclass(frozen=True)
class SearchBudget:
    """Limits for blocking-coalition search.  ``None`` means unlimited."""

    max_coalition_size: int | None = None
    max_nodes: int | None = None
    connected_only: bool = False

    @property
    def unlimited(self) -> bool:
        return self.max_coalition_size is None and self.max_nodes is None


@dataclass
class SearchResult:
    certificate: BlockingCertificate | None
    complete: bool
    nodes: int = 0

    @property
    def status(self) -> str:
        if self.certificate is not None:
            return "blocked"
        return "none-found" if self.complete else "budget-exhausted"


@dataclass
class StabilityReport:
    verdict: Verdict
    certificate: BlockingCertificate | None = None
    nodes: int = 0
    method: str = ""

    def __bool__(self):
        return self.verdict is Verdict.STABLE


# ---------------------------------------------------------------------------
# exact integer utility tables


def _scaled_matrix(game: Game) -> tuple[list[list[int]], int]:
    scale = 1
    for row in game.valuations:
        for x in row:
            scale = math.lcm(scale, x.denominator)
    return [[int(x * scale) for x in row] for row in game.valuations], scale


def _subsidy_list(game: AnyGame) -> dict[int, int]:
    return game.subsidies if isinstance(game, SupportedGame) else {}


class _SubsetTable:
    """Utility of every player in every nonempty subset as num/den integers.

    Row ``m - 1`` describes the subset with bitmask ``m``.
    """

    def __init__(self, game: AnyGame):
        n = game.n
        mat, scale = _scaled_matrix(base_game(game))
        masks = np.arange(1, 1 << n, dtype=np.int64)
        member = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
        size = member.sum(axis=1).astype(np.int64)
        max_l = max(_subsidy_list(game).values(), default=1)
        max_num = max(abs(x) for row in mat for x in row) * n + max_l * scale
        dtype = np.int64 if max_num * max(n, max_l) < 2**62 else object
        w = np.array(mat, dtype=dtype)
        num = member.astype(dtype) @ w.T
        den = np.broadcast_to(size[:, None], num.shape).astype(dtype).copy()
        for i, l in _subsidy_list(game).items():
            num[(1 << i) - 1, i] = (l - 1) * scale
            den[(1 << i) - 1, i] = l
        self.n = n
        self.member = member
        self.size = size
        self.num = num
        self.den = den

    def current(self, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Numerators/denominators of each player's utility in a batch of partitions."""
        n = self.n
        same = labels[:, :, None] == labels[:, None, :]
        cmask = (same * (np.int64(1) << np.arange(n, dtype=np.int64))).sum(axis=2)
        rows = cmask - 1
        cols = np.broadcast_to(np.arange(n), rows.shape)
        return self.num[rows, cols], self.den[rows, cols]

    def blocking_matrix(self, labels: np.ndarray, kind: Kind) -> np.ndarray:
        """Boolean (batch, subsets) array: does subset block the partition."""
        cur_num, cur_den = self.current(labels)
        lhs = self.num[None, :, :] * cur_den[:, None, :]
        rhs = cur_num[:, None, :] * self.den[None, :, :]
        out = ~self.member[None, :, :]
        if kind is Kind.STRONG:
            return np.all((lhs > rhs) | out, axis=2)
        ok = np.all((lhs >= rhs) | out, axis=2)
        return ok & np.any((lhs > rhs) & self.member[None, :, :], axis=2)


def _table(game: AnyGame) -> _SubsetTable:
    cached = getattr(game, "_fhg_subset_table", None)
    if cached is None:
        cached = _SubsetTable(game)
        try:
            game._fhg_subset_table = cached
        except AttributeError:
            pass
    return cached


def _labels_array(partition: Partition) -> np.ndarray:
    return np.asarray(partition.labels(), dtype=np.int64)[None, :]


def _mask_members(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _canonical_key(members: Iterable[int]):
    ordered = tuple(sorted(members))
    return (len(ordered), ordered)


# ---------------------------------------------------------------------------
# all-subsets search


def _dense_all(game: AnyGame, partition: Partition, kind: Kind, cap: int | None) -> list[frozenset[int]]:
    table = _table(game)
    hit = table.blocking_matrix(_labels_array(partition), kind)[0]
    if cap is not None:
        hit &= table.size <= cap
    return [_mask_members(int(m) + 1) for m in np.flatnonzero(hit)]


def _all_subsets(game: AnyGame, partition: Partition, kind: Kind, budget: SearchBudget) -> SearchResult:
    n = game.n
    cap = n if budget.max_coalition_size is None else min(n, budget.max_coalition_size)
    total = sum(math.comb(n, k) for k in range(1, cap + 1))
    if n <= _DENSE_SUBSETS and (budget.max_nodes is None or budget.max_nodes >= total):
        found = _dense_all(game, partition, kind, cap)
        cert = None
        if found:
            best = min(found, key=_canonical_key)
            cert = BlockingCertificate.build(game, partition, best, kind)
        return SearchResult(cert, cap >= n, total)
    nodes = 0
    for k in range(1, cap + 1):
        for combo in itertools.combinations(range(n), k):
            nodes += 1
            if budget.max_nodes is not None and nodes > budget.max_nodes:
                return SearchResult(None, False, nodes - 1)
            if blocks(game, partition, combo, kind):
                return SearchResult(BlockingCertificate.build(game, partition, combo, kind), True, nodes)
    return SearchResult(None, cap >= n, nodes)


# ---------------------------------------------------------------------------
# connected branch and bound


@dataclass
class _Problem:
    """Plain-data view of a (supported) simple symmetric game and partition."""

    n: int
    adj: tuple[int, ...]
    cur: tuple[tuple[int, int], ...]  # utility in the partition as (num, den)
    solo: tuple[tuple[int, int], ...]  # singleton utility as (num, den)
    strong: bool
    eligible: int = 0

    @classmethod
    def build(cls, game: AnyGame, partition: Partition, kind: Kind) -> "_Problem":
        adj = game.adjacency_masks
        cur, solo = [], []
        for i in range(game.n):
            block = partition.coalition_of(i)
            if len(block) == 1:
                u = game.singleton_utility(i)
                cur.append((u.numerator, u.denominator))
            else:
                cur.append((len(game.adjacency[i] & block), len(block)))
            s = game.singleton_utility(i)
            solo.append((s.numerator, s.denominator))
        prob = cls(game.n, tuple(adj), tuple(cur), tuple(solo), kind is Kind.STRONG)
        prob.eligible = prob._eligible()
        return prob

    def _ok(self, i: int, num: int, den: int) -> bool:
        p, q = self.cur[i]
        lhs, rhs = num * q, p * den
        return lhs > rhs if self.strong else lhs >= rhs

    def _eligible(self) -> int:
        # peel players whose best possible utility k/(k+1) cannot beat the current one
        elig = (1 << self.n) - 1
        changed = True
        while changed:
            changed = False
            for i in range(self.n):
                if elig >> i & 1:
                    k = (self.adj[i] & elig).bit_count()
                    if k == 0 or not self._ok(i, k, k + 1):
                        elig &= ~(1 << i)
                        changed = True
        return elig

    def singleton_blocks(self, i: int) -> bool:
        p, q = self.solo[i]
        c, d = self.cur[i]
        return p * d > c * q


def _search_seed(prob: _Problem, seed: int, cap: int | None, node_limit: int | None):
    """Depth-first search over connected coalitions whose smallest member is ``seed``.

    Returns ``(mask or None, truncated, nodes)``; ``nodes`` exceeding
    ``node_limit`` aborts with ``truncated`` set.
    """
    adj, cur, strong = prob.adj, prob.cur, prob.strong
    base_forb = ((1 << seed) - 1) | ~prob.eligible
    stack = [(1 << seed, base_forb)]
    nodes = 0
    truncated = False
    while stack:
        s_mask, forb = stack.pop()
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            return None, True, nodes - 1
        allowed = ~forb & ~s_mask
        members = [i for i in range(s_mask.bit_length()) if s_mask >> i & 1]
        s = len(members)
        feasible = True
        blocking = s >= 2
        strict_seen = False
        frontier = 0
        for i in members:
            a_i = adj[i]
            d = (a_i & s_mask).bit_count()
            p, q = cur[i]
            lhs, rhs = d * q, p * s
            if strong:
                if lhs <= rhs:
                    blocking = False
            elif lhs < rhs:
                blocking = False
            elif lhs > rhs:
                strict_seen = True
            room = (a_i & allowed).bit_count()
            lhs, rhs = (d + room) * q, p * (s + room)
            if lhs < rhs or (strong and lhs == rhs):
                feasible = False
                break
            frontier |= a_i
        if feasible and blocking and (strong or strict_seen):
            return s_mask, truncated, nodes
        if not feasible:
            continue
        frontier &= allowed
        if not frontier:
            continue
        if cap is not None and s >= cap:
            truncated = True
            continue
        w = frontier & -frontier
        stack.append((s_mask, forb | w))
        stack.append((s_mask | w, forb))
    return None, truncated, nodes


def _seed_worker(args):
    prob, seed, cap = args
    return _search_seed(prob, seed, cap, None)


def _connected_search(
    game: AnyGame,
    partition: Partition,
    kind: Kind,
    budget: SearchBudget,
    workers: int = 1,
    collect: bool = False,
):
    """Run the connected search; with ``collect`` return the first hit of every seed."""
    prob = _Problem.build(game, partition, kind)
    cap = budget.max_coalition_size
    found: list[frozenset[int]] = []
    for i in range(game.n):
        if prob.singleton_blocks(i):
            found.append(frozenset([i]))
            if not collect:
                return found, True, game.n
    nodes = game.n
    complete = True
    seeds = [v for v in range(game.n) if prob.eligible >> v & 1]
    if cap is not None and cap < 2:
        return found, not seeds, nodes
    if workers > 1 and budget.max_nodes is None and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_seed_worker, [(prob, v, cap) for v in seeds]))
        for mask, truncated, used in results:
            nodes += used
            complete &= not truncated
            if mask is not None:
                found.append(_mask_members(mask))
                if not collect:
                    break
        return found, complete, nodes
    for v in seeds:
        limit = None if budget.max_nodes is None else max(budget.max_nodes - nodes, 0)
        mask, truncated, used = _search_seed(prob, v, cap, limit)
        nodes += used
        if truncated:
            complete = False
        if mask is not None:
            found.append(_mask_members(mask))
            if not collect:
                return found, complete, nodes
        if budget.max_nodes is not None and nodes >= budget.max_nodes:
            return found, False, nodes
    return found, complete, nodes


def _check_connected_allowed(game: AnyGame) -> None:
    if not (base_game(game).is_simple and base_game(game).is_symmetric):
        raise ValueError("connected-only search requires a simple symmetric game")


# ---------------------------------------------------------------------------
# public search API


def find_blocking(
    game: AnyGame,
    partition: Partition,
    kind: Kind | str = Kind.STRONG,
    budget: SearchBudget | None = None,
    *,
    workers: int = 1,
) -> SearchResult:
    """Search for a (strongly or weakly) blocking coalition of ``partition``.

    A result with no certificate is a stability proof only when
    ``result.complete`` is true.  ``workers > 1`` splits the connected
    search across processes by seed; the returned certificate is the one
    the sequential search would find.
    """
    kind = Kind(kind)
    budget = budget or SearchBudget()
    if partition.n != game.n:
        raise ValueError(f"partition covers {partition.n} players, game has {game.n}")
    if budget.connected_only:
        _check_connected_allowed(game)
        found, complete, nodes = _connected_search(game, partition, kind, budget, workers)
        cert = BlockingCertificate.build(game, partition, found[0], kind) if found else None
        return SearchResult(cert, complete or cert is not None, nodes)
    return _all_subsets(game, partition, kind, budget)


def find_all_blocking(game: AnyGame, partition: Partition, kind: Kind | str = Kind.STRONG) -> list[BlockingCertificate]:
    """Every blocking coalition, by brute force (small games only)."""
    kind = Kind(kind)
    if game.n > _DENSE_SUBSETS:
        raise ValueError(f"find_all_blocking is limited to {_DENSE_SUBSETS} players")
    return [
        BlockingCertificate.build(game, partition, s, kind)
        for s in sorted(_dense_all(game, partition, kind, None), key=_canonical_key)
    ]


def _report(result: SearchResult, method: str) -> StabilityReport:
    if result.certificate is not None:
        return StabilityReport(Verdict.UNSTABLE, result.certificate, result.nodes, method)
    verdict = Verdict.STABLE if result.complete else Verdict.UNKNOWN
    return StabilityReport(verdict, None, result.nodes, method)


def _method(budget: SearchBudget) -> str:
    m = "connected" if budget.connected_only else "all-subsets"
    if budget.max_coalition_size is not None:
        m += f", size <= {budget.max_coalition_size}"
    return m


def is_core_stable(game: AnyGame, partition: Partition, budget: SearchBudget | None = None, *, workers: int = 1) -> StabilityReport:
    budget = budget or SearchBudget()
    return _report(find_blocking(game, partition, Kind.STRONG, budget, workers=workers), _method(budget))


def is_strict_core_stable(game: AnyGame, partition: Partition, budget: SearchBudget | None = None, *, workers: int = 1) -> StabilityReport:
    budget = budget or SearchBudget()
    return _report(find_blocking(game, partition, Kind.WEAK, budget, workers=workers), _method(budget))


# ---------------------------------------------------------------------------
# exhaustive enumeration


def _check_bound(n: int, bound: int | None) -> None:
    bound = max_exhaustive_players if bound is None else bound
    if n > bound:
        raise ValueError(
            f"{n} players exceeds the exhaustive bound {bound}; "
            "use a budgeted find_blocking/deviation_walk instead"
        )


def _rgs_blocks(n: int, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
    """Restricted growth strings of length ``n`` as int8 arrays, in lexicographic order."""
    if n == 0:
        return
    # grow a prefix table until it is large, then recurse prefix by prefix
    rows = np.zeros((1, 1), dtype=np.int8)
    maxes = np.zeros(1, dtype=np.int8)
    pos = 1
    while pos < n and len(rows) * (int(maxes.max()) + 2) <= chunk:
        rows, maxes = _rgs_extend(rows, maxes)
        pos += 1
    if pos == n:
        yield rows
        return
    for row, m in zip(rows, maxes):
        yield from _rgs_suffix(row[None, :], np.array([m], dtype=np.int8), n - pos, chunk)


def _rgs_extend(rows: np.ndarray, maxes: np.ndarray):
    reps = maxes.astype(np.int64) + 2
    idx = np.repeat(np.arange(len(rows)), reps)
    offsets = np.arange(reps.sum()) - np.repeat(np.cumsum(reps) - reps, reps)
    new_col = offsets.astype(np.int8)
    new_rows = np.concatenate([rows[idx], new_col[:, None]], axis=1)
    new_max = np.maximum(maxes[idx], new_col)
    return new_rows, new_max


def _rgs_suffix(rows, maxes, remaining, chunk):
    while remaining and len(rows) * (int(maxes.max()) + 2) <= chunk:
        rows, maxes = _rgs_extend(rows, maxes)
        remaining -= 1
    if not remaining:
        yield rows
        return
    for row, m in zip(rows, maxes):
        yield from _rgs_suffix(row[None, :], np.array([m], dtype=np.int8), remaining, chunk)


def restricted_growth_strings(n: int) -> Iterator[tuple[int, ...]]:
    for block in _rgs_blocks(n):
        for row in block:
            yield tuple(int(x) for x in row)


def enumerate_partitions(n: int, bound: int | None = None) -> Iterator[Partition]:
    """Every set partition of ``0..n-1`` exactly once, in restricted-growth order."""
    _check_bound(n, bound)
    for labels in restricted_growth_strings(n):
        yield Partition.from_labels(labels)


def _stable_label_blocks(game: AnyGame, kind: Kind, bound: int | None):
    n = game.n
    _check_bound(n, bound)
    if n > _DENSE_SUBSETS:
        raise ValueError(f"exhaustive oracle is limited to {_DENSE_SUBSETS} players")
    table = _table(game)
    # small coalitions block most partitions, so test them first and drop
    # every partition as soon as it is blocked
    order = np.argsort(table.size, kind="stable")
    members = [np.flatnonzero(table.member[r]) for r in order]
    for block in _rgs_blocks(n):
        labels = block.astype(np.int64)
        cur_num, cur_den = table.current(labels)
        alive = np.arange(len(labels))
        for r, idx in zip(order, members):
            if not len(alive):
                break
            lhs = table.num[r, idx] * cur_den[alive][:, idx]
            rhs = cur_num[alive][:, idx] * table.den[r, idx]
            if kind is Kind.STRONG:
                hit = np.all(lhs > rhs, axis=1)
            else:
                hit = np.all(lhs >= rhs, axis=1) & np.any(lhs > rhs, axis=1)
            alive = alive[~hit]
        ok = np.zeros(len(labels), dtype=bool)
        ok[alive] = True
        yield labels, ok


def stable_partitions(game: AnyGame, kind: Kind | str = Kind.STRONG, bound: int | None = None) -> Iterator[Partition]:
    """All core (``strong``) or strict-core (``weak``) stable partitions."""
    kind = Kind(kind)
    for labels, ok in _stable_label_blocks(game, kind, bound):
        for row in labels[ok]:
            yield Partition.from_labels(row.tolist())


def core_nonempty_exhaustive(
    game: AnyGame,
    n_bound: int | None = None,
    kind: Kind | str = Kind.STRONG,
    *,
    walk_steps: int = 200,
) -> Partition | None:
    """A stable partition, or ``None`` if exhaustive enumeration finds none.

    A short deviation walk from the singletons is tried first; its end
    point is accepted only after an all-subsets check.  Otherwise the first
    stable partition in restricted-growth order is returned.
    """
    kind = Kind(kind)
    _check_bound(game.n, n_bound)
    if walk_steps and game.n <= _DENSE_SUBSETS:
        walk = deviation_walk(game, Partition.singletons(game.n), walk_steps, SearchBudget())
        if walk.converged and not find_blocking(game, walk.partition, kind).certificate:
            return walk.partition
    return next(stable_partitions(game, kind, n_bound), None)


# ---------------------------------------------------------------------------
# deviation walk


@dataclass
class WalkResult:
    converged: bool
    partition: Partition
    steps: int
    reason: str  # "converged" | "cycled" | "exhausted" | "unknown"
    trace: list[BlockingCertificate] = field(default_factory=list)
    cycle_start: int | None = None


def _walk_candidates(game: AnyGame, partition: Partition, budget: SearchBudget):
    if budget.connected_only:
        found, complete, _ = _connected_search(game, partition, Kind.STRONG, budget, collect=True)
        return [BlockingCertificate.build(game, partition, s, Kind.STRONG) for s in found], complete
    if game.n <= _DENSE_SUBSETS and budget.max_nodes is None:
        cap = budget.max_coalition_size
        found = _dense_all(game, partition, Kind.STRONG, cap)
        return [BlockingCertificate.build(game, partition, s, Kind.STRONG) for s in found], cap is None or cap >= game.n
    res = _all_subsets(game, partition, Kind.STRONG, budget)
    return ([res.certificate] if res.certificate else []), res.complete


def _deviate(partition: Partition, coalition: frozenset[int]) -> Partition:
    rest = [block - coalition for block in partition]
    return Partition([coalition] + [b for b in rest if b], partition.n)


def deviation_walk(
    game: AnyGame,
    start: Partition,
    max_steps: int = 1000,
    budget: SearchBudget | None = None,
) -> WalkResult:
    """Repeatedly implement a blocking coalition until none exists.

    The deviating coalition maximises the smallest utility gain, then
    prefers smaller coalitions, then lexicographically smaller members.
    Remnants of broken coalitions stay together.  The walk is
    deterministic, so revisiting a partition means it cycles forever.
    """
    budget = budget or SearchBudget(connected_only=base_game(game).is_simple and base_game(game).is_symmetric)
    partition = start
    seen = {partition: 0}
    trace: list[BlockingCertificate] = []
    for step in range(max_steps + 1):
        candidates, complete = _walk_candidates(game, partition, budget)
        if not candidates:
            if complete:
                return WalkResult(True, partition, step, "converged", trace)
            return WalkResult(False, partition, step, "unknown", trace)
        if step == max_steps:
            break
        best = min(candidates, key=lambda c: (-c.min_gain, *_canonical_key(c.coalition)))
        trace.append(best)
        partition = _deviate(partition, best.coalition)
        if partition in seen:
            return WalkResult(False, partition, step + 1, "cycled", trace, seen[partition])
        seen[partition] = step + 1
    return WalkResult(False, partition, max_steps, "exhausted", trace)
