import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fhg.instances import gadget, gadget_info
from fhg.model import Game, Partition, SupportedGame
from fhg.stability import (
    BlockingCertificate,
    Kind,
    SearchBudget,
    Verdict,
    blocks,
    core_nonempty_exhaustive,
    deviation_walk,
    enumerate_partitions,
    find_all_blocking,
    find_blocking,
    is_core_stable,
    is_strict_core_stable,
    restricted_growth_strings,
    stable_partitions,
)
from oracles import naive_blocking_sets, naive_blocks, naive_partitions, naive_stable, random_graph, random_partition

CONNECTED = SearchBudget(connected_only=True)
FIG2_CORE = Partition([[0, 1, 2], [3, 4, 5]], 6)


# -- certificates ----------------------------------------------------------------


def test_bridged_triangles_grand_coalition_blocked_by_triangle():
    for budget in (SearchBudget(), CONNECTED):
        res = find_blocking(gadget("fig2-6"), Partition.grand(6), Kind.STRONG, budget)
        assert res.status == "blocked"
        cert = res.certificate
        assert cert.coalition == {0, 1, 2}
        assert cert.member_deltas == tuple((i, Fraction(1, 2), Fraction(2, 3)) for i in range(3))


def test_bridged_triangles_core_partition_has_no_blocker():
    for budget in (SearchBudget(), CONNECTED):
        res = find_blocking(gadget("fig2-6"), FIG2_CORE, "strong", budget)
        assert res.status == "none-found" and res.complete


def test_c5_weak_certificate_against_pairs():
    c5 = gadget("c5")
    p = Partition([[0, 1], [2, 3], [4]], 5)
    cert = find_blocking(c5, p, Kind.WEAK).certificate
    assert cert is not None and cert.verify(c5, p)
    assert naive_blocks(c5, p, cert.coalition, weak=True)
    # the pair partition is still in the core
    assert is_core_stable(c5, p).verdict is Verdict.STABLE


def test_one_player_game_is_stable():
    g = Game([[0]])
    assert is_core_stable(g, Partition.singletons(1)).verdict is Verdict.STABLE
    assert is_strict_core_stable(g, Partition.singletons(1)).verdict is Verdict.STABLE


def test_bakers_millers_three_players():
    info = gadget_info("bakers-millers-3")
    g, p = info.game, info.partition
    assert is_core_stable(g, p).verdict is Verdict.STABLE
    rep = is_strict_core_stable(g, p)
    assert rep.verdict is Verdict.UNSTABLE and rep.certificate.coalition == {0, 2}
    assert is_strict_core_stable(g, Partition.grand(3)).verdict is Verdict.STABLE


def test_certificate_verify_rejects_tampering():
    g = gadget("fig2-6")
    cert = find_blocking(g, Partition.grand(6)).certificate
    bad = BlockingCertificate(cert.coalition, cert.kind, cert.member_deltas[:-1])
    assert cert.verify(g, Partition.grand(6))
    assert not bad.verify(g, Partition.grand(6))
    assert not cert.verify(g, FIG2_CORE)


def test_blocks_definitions():
    g = gadget("c5")
    p = Partition([[0, 1], [2, 3], [4]], 5)
    assert blocks(g, p, {0, 4}, Kind.WEAK)
    assert not blocks(g, p, {0, 4}, Kind.STRONG)


def test_connected_search_needs_simple_symmetric_game():
    with pytest.raises(ValueError):
        find_blocking(gadget("symmetric-6"), Partition.grand(6), Kind.STRONG, CONNECTED)


def test_partition_size_must_match_game():
    with pytest.raises(ValueError):
        find_blocking(gadget("c5"), Partition.grand(4))


def test_find_all_blocking_matches_brute_force(rng):
    for _ in range(40):
        g = random_graph(rng, 6, 0.5)
        p = random_partition(rng, 6)
        for weak in (False, True):
            found = {c.coalition for c in find_all_blocking(g, p, Kind.WEAK if weak else Kind.STRONG)}
            assert found == set(naive_blocking_sets(g, p, weak))


# -- budgets -----------------------------------------------------------------------


def test_node_budget_never_claims_stability():
    info = gadget_info("remark1-39")
    rep = is_core_stable(info.game, info.partition, SearchBudget(max_nodes=10, connected_only=True))
    assert rep.verdict is Verdict.UNKNOWN
    rep = is_core_stable(gadget("fig2-6"), FIG2_CORE, SearchBudget(max_nodes=3))
    assert rep.verdict is Verdict.UNKNOWN


def test_size_cap_that_cuts_a_feasible_branch_is_reported():
    # a tiny cap on the 39-player partition cannot see the larger candidates
    info = gadget_info("remark1-39")
    res = find_blocking(info.game, info.partition, Kind.STRONG, SearchBudget(max_coalition_size=6, connected_only=True))
    assert res.status == "budget-exhausted"


def test_size_cap_results_agree_with_brute_force(rng):
    for _ in range(150):
        n = rng.randint(2, 9)
        g = random_graph(rng, n, rng.random())
        p = random_partition(rng, n, rng.randint(1, n))
        cap = rng.randint(1, n)
        truth = [s for s in naive_blocking_sets(g, p) if len(s) <= cap]
        res = find_blocking(g, p, Kind.STRONG, SearchBudget(max_coalition_size=cap, connected_only=True))
        if res.certificate is not None:
            assert len(res.certificate.coalition) <= cap and res.certificate.verify(g, p)
        else:
            # the connected search may only say "none" when no small blocker exists
            assert not truth or not res.complete
            if res.complete:
                assert not naive_blocking_sets(g, p)


def test_parallel_search_matches_sequential():
    info = gadget_info("remark1-39")
    seq = is_core_stable(info.game, info.partition, CONNECTED)
    par = is_core_stable(info.game, info.partition, CONNECTED, workers=2)
    assert seq.verdict is par.verdict is Verdict.STABLE
    g = gadget("empty-core-40")
    start = Partition.from_labels([i % 7 for i in range(40)])
    a = find_blocking(g, start, Kind.STRONG, CONNECTED)
    b = find_blocking(g, start, Kind.STRONG, CONNECTED, workers=3)
    assert a.certificate == b.certificate


def test_supported_players_block_alone():
    sg = SupportedGame(Game.from_edges(3, [(0, 1), (1, 2)]), {0: 4})
    cert = find_blocking(sg, Partition([[0, 1], [2]], 3)).certificate
    assert cert.coalition == {0}
    assert find_blocking(sg, Partition([[0, 1], [2]], 3), Kind.STRONG, CONNECTED).certificate.coalition == {0}


# -- pruning soundness -----------------------------------------------------------


def test_connected_and_all_subsets_agree(rng):
    for _ in range(200):
        n = rng.randint(1, 9)
        g = random_graph(rng, n, rng.random())
        p = random_partition(rng, n, rng.randint(1, n))
        for kind in Kind:
            full = find_blocking(g, p, kind)
            conn = find_blocking(g, p, kind, CONNECTED)
            assert full.complete and conn.complete
            assert (full.certificate is None) == (conn.certificate is None)
            assert (full.certificate is None) == naive_stable(g, p, kind is Kind.WEAK)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 8), st.data())
def test_every_certificate_reverifies(n, data):
    pairs = list(itertools.combinations(range(n), 2))
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    g = Game.from_edges(n, edges)
    labels = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    p = Partition.from_labels(labels)
    for kind in Kind:
        for budget in (SearchBudget(), CONNECTED):
            cert = find_blocking(g, p, kind, budget).certificate
            if cert is not None:
                assert cert.verify(g, p)
                assert naive_blocks(g, p, cert.coalition, kind is Kind.WEAK)


def test_weighted_games_against_brute_force(rng):
    for _ in range(60):
        n = rng.randint(1, 6)
        g = Game([[0 if i == j else rng.randint(-4, 6) for j in range(n)] for i in range(n)])
        p = random_partition(rng, n)
        for kind in Kind:
            assert (find_blocking(g, p, kind).certificate is None) == naive_stable(g, p, kind is Kind.WEAK)


def test_strict_core_implies_core(rng):
    for _ in range(100):
        n = rng.randint(2, 7)
        g = random_graph(rng, n, rng.random())
        p = random_partition(rng, n)
        if is_strict_core_stable(g, p):
            assert is_core_stable(g, p)


# -- enumeration -------------------------------------------------------------------


@pytest.mark.parametrize("n,bell", [(1, 1), (3, 5), (5, 52), (6, 203), (8, 4140)])
def test_partition_counts(n, bell):
    assert sum(1 for _ in enumerate_partitions(n)) == bell


def test_enumeration_matches_independent_generator():
    for n in range(1, 8):
        ours = [p for p in enumerate_partitions(n)]
        assert len(set(ours)) == len(ours)
        assert set(ours) == {Partition(b, n) for b in naive_partitions(n)}


def test_restricted_growth_order():
    rgs = list(restricted_growth_strings(4))
    assert rgs == sorted(rgs)
    assert rgs[0] == (0, 0, 0, 0) and rgs[-1] == (0, 1, 2, 3)


def test_enumeration_bound():
    with pytest.raises(ValueError, match="budgeted"):
        next(enumerate_partitions(14))
    assert next(enumerate_partitions(14, bound=14)) == Partition.grand(14)


def test_stable_partitions_match_brute_force(rng):
    for _ in range(15):
        n = rng.randint(1, 6)
        g = random_graph(rng, n, rng.random())
        for weak in (False, True):
            ours = set(stable_partitions(g, Kind.WEAK if weak else Kind.STRONG))
            truth = {Partition(b, n) for b in naive_partitions(n) if naive_stable(g, Partition(b, n), weak)}
            assert ours == truth


def test_core_nonempty_examples():
    assert core_nonempty_exhaustive(gadget("digraph-5")) is None
    assert core_nonempty_exhaustive(gadget("symmetric-6")) is None
    assert core_nonempty_exhaustive(gadget("fig2-6")) == FIG2_CORE
    assert core_nonempty_exhaustive(gadget("fig2-6"), walk_steps=0) == FIG2_CORE
    assert core_nonempty_exhaustive(gadget("c5"), kind="weak") is None


def test_core_nonempty_answer_is_stable(rng):
    for _ in range(30):
        n = rng.randint(1, 6)
        g = Game([[0 if i == j else rng.randint(-3, 3) for j in range(n)] for i in range(n)])
        found = core_nonempty_exhaustive(g)
        exists = any(naive_stable(g, Partition(b, n)) for b in naive_partitions(n))
        assert (found is not None) == exists
        if found is not None:
            assert naive_stable(g, found)


# -- deviation walk -----------------------------------------------------------------


def _replay(start, trace):
    p = start
    for cert in trace:
        rest = [b - cert.coalition for b in p]
        p = Partition([cert.coalition] + [b for b in rest if b], p.n)
    return p


def test_walk_bridged_triangles_converges_fast():
    res = deviation_walk(gadget("fig2-6"), Partition.grand(6), max_steps=10)
    assert res.converged and res.steps <= 3 and res.partition == FIG2_CORE


def test_walk_from_stable_start():
    res = deviation_walk(gadget("fig2-6"), FIG2_CORE)
    assert res.converged and res.steps == 0 and res.partition == FIG2_CORE


@pytest.mark.parametrize("name", ["symmetric-6", "digraph-5"])
def test_walk_never_converges_on_empty_core(name, rng):
    g = gadget(name)
    for _ in range(10):
        res = deviation_walk(g, random_partition(rng, g.n), max_steps=1000)
        assert not res.converged and res.reason in ("cycled", "exhausted")


def test_walk_choice_rule_and_validity(rng):
    for _ in range(30):
        n = rng.randint(2, 8)
        g = random_graph(rng, n, 0.5)
        start = random_partition(rng, n)
        res = deviation_walk(g, start, max_steps=50, budget=SearchBudget())
        assert _replay(start, res.trace) == res.partition
        p = start
        for cert in res.trace:
            options = naive_blocking_sets(g, p)
            best = max(
                options,
                key=lambda s: (
                    min(cert_gain(g, p, s)),
                    -len(s),
                    tuple(-x for x in sorted(s)),
                ),
            )
            assert cert.coalition == best
            p = _replay(p, [cert])
        if res.converged:
            assert naive_stable(g, res.partition)


def cert_gain(g, p, s):
    return [BlockingCertificate.build(g, p, s, Kind.STRONG).min_gain]


def test_walk_remnants_stay_together():
    g = gadget("fig2-6")
    res = deviation_walk(g, Partition.grand(6), max_steps=1)
    # the triangle leaves and the other three players remain one coalition
    assert res.partition == FIG2_CORE


def test_walk_step_cap():
    res = deviation_walk(gadget("symmetric-6"), Partition.grand(6), max_steps=2)
    assert not res.converged and res.steps <= 2
