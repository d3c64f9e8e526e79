import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fhg.instances import gadget
from fhg.model import (
    Game,
    NotSimpleSymmetricError,
    Partition,
    Preference,
    SupportedGame,
    TypeSpace,
    connected_components,
    girth,
    is_forest,
    is_individually_rational,
    prefers,
    to_rational,
    two_coloring,
    utility,
)
from oracles import naive_girth, naive_utility, random_graph


# -- rationals -----------------------------------------------------------------


def test_to_rational_parses_exact_decimals_and_fractions():
    assert to_rational("0.1") == Fraction(1, 10)
    assert to_rational("-3/6") == Fraction(-1, 2)
    assert to_rational(7) == 7


@pytest.mark.parametrize("bad", ["1.2.3", "x", "1/0", ""])
def test_to_rational_rejects_malformed_text(bad):
    with pytest.raises(ValueError):
        to_rational(bad)


def test_to_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        to_rational(0.1)
    with pytest.raises(TypeError):
        to_rational(True)


def test_fractions_are_in_lowest_terms():
    x = to_rational("-6/4")
    assert (x.numerator, x.denominator) == (-3, 2)


# -- games -----------------------------------------------------------------------


def test_empty_game_rejected():
    with pytest.raises(ValueError):
        Game([])


def test_nonzero_diagonal_rejected_but_can_be_normalised():
    with pytest.raises(ValueError):
        Game([[1, 0], [0, 0]])
    g = Game.from_unnormalized([[1, 3], [2, 5]])
    assert g.valuations == ((0, 2), (-3, 0))


def test_flags():
    g = Game.from_edges(3, [(0, 1)])
    assert g.is_simple and g.is_symmetric
    d = Game.from_weights(2, {(0, 1): 1})
    assert d.is_simple and not d.is_symmetric
    w = Game.from_weights(2, {(0, 1): 2}, symmetric=True)
    assert w.is_symmetric and not w.is_simple


def test_one_player_game_is_legal():
    g = Game([[0]])
    assert utility(g, 0, {0}) == 0


def test_bridged_triangles_utilities():
    g = gadget("fig2-6")
    assert utility(g, 0, {0, 1, 2}) == Fraction(2, 3)
    assert all(utility(g, i, range(6)) == Fraction(1, 2) for i in range(6))


def test_singleton_utility_is_zero():
    g = gadget("symmetric-6")
    assert all(utility(g, i, {i}) == 0 for i in range(6))


def test_digraph_arc_weights_follow_displayed_labels():
    g = gadget("digraph-5")
    # player 1 values 2 at 2 and player 5 at 1
    assert utility(g, 0, {0, 1}) == 1
    assert utility(g, 0, {0, 4}) == Fraction(1, 2)
    assert utility(g, 0, {0, 2}) == -5


def test_utility_requires_membership():
    g = gadget("c5")
    with pytest.raises(ValueError):
        utility(g, 0, {1, 2})


def test_prefers():
    fig2 = gadget("fig2-6")
    assert prefers(fig2, 0, {0, 1, 2}, range(6)) is Preference.STRICTLY
    assert prefers(fig2, 0, {0, 1}, {0, 1}) is Preference.INDIFFERENT
    assert prefers(fig2, 0, range(6), {0, 1, 2}) is Preference.WORSE
    c5 = gadget("c5")
    # 1/2 against 1/3
    assert prefers(c5, 0, {0, 1}, {0, 1, 2}) is Preference.STRICTLY
    assert Preference.INDIFFERENT.weakly and not Preference.WORSE.weakly
    with pytest.raises(ValueError):
        prefers(c5, 0, {0, 1}, {1, 2})


def test_individual_rationality():
    assert is_individually_rational(gadget("fig2-6"), Partition.grand(6))
    assert is_individually_rational(gadget("digraph-5"), Partition.singletons(5))
    # player 3 holds a -10 arc towards player 1
    assert not is_individually_rational(gadget("digraph-5"), Partition([[0, 1, 2], [3], [4]], 5))


def test_supported_singleton_utility():
    sg = SupportedGame(Game.from_edges(3, [(0, 1)]), {2: 4})
    assert sg.utility(2, {2}) == Fraction(3, 4)
    assert sg.utility(0, {0}) == 0
    assert sg.utility(2, {1, 2}) == 0


# -- partitions ------------------------------------------------------------------


def test_partition_invariants():
    p = Partition([[2, 0], [1]], 3)
    assert p.coalition_of(0) == {0, 2}
    assert p.labels() == (0, 1, 0)
    assert Partition.from_labels([5, 1, 5]) == p
    for bad in ([[0, 1], [1, 2]], [[0], [2]], [[0, 1, 2], []], [[0, 1, 3]]):
        with pytest.raises(ValueError):
            Partition(bad, 3)


def test_partition_is_hashable_and_order_free():
    assert hash(Partition([[1], [0, 2]], 3)) == hash(Partition([[2, 0], [1]], 3))


def test_type_space():
    t = TypeSpace.from_sizes([2, 4])
    assert t.sizes == (2, 4) and t.d == 2 and t.n == 6 and t.k == 2
    assert TypeSpace([0, 1, 1]).d == 1
    with pytest.raises(ValueError):
        TypeSpace([0, 2])


# -- graph helpers ---------------------------------------------------------------


def test_connected_components():
    assert connected_components(gadget("fig2-6")) == [frozenset(range(6))]
    assert len(connected_components(Game.from_edges(3, []))) == 3
    two = Game.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert sorted(map(len, connected_components(two))) == [3, 3]
    with pytest.raises(ValueError):
        connected_components(gadget("digraph-5"))


def test_girth_examples():
    assert girth(gadget("c5")) == 5
    assert girth(Game.from_edges(4, itertools.combinations(range(4), 2))) == 3
    assert girth(Game.from_edges(4, [(0, 1), (1, 2), (1, 3)])) == math.inf
    assert girth(gadget("petersen")) == 5
    with pytest.raises(NotSimpleSymmetricError):
        girth(gadget("symmetric-6"))


def test_two_coloring_and_forest():
    assert two_coloring(gadget("c5")) is None
    col = two_coloring(Game.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]))
    assert col[0] != col[1] and col[0] == col[2]
    assert is_forest(Game.from_edges(3, [(0, 1)]))
    assert not is_forest(gadget("c5"))


def _all_graphs(n):
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        yield Game.from_edges(n, [e for k, e in enumerate(pairs) if bits >> k & 1])


def _common_neighbour_condition(g):
    # adjacency itself counts as one neighbour in common
    adj = g.adjacency
    return all(
        len(adj[u] & adj[v]) + (v in adj[u]) <= 1
        for u, v in itertools.combinations(range(g.n), 2)
    )


def _check_girth_by_common_neighbours(g):
    assert (girth(g) >= 5) == _common_neighbour_condition(g)


@pytest.mark.parametrize("n", range(3, 7))
def test_girth_common_neighbours_all_graphs_up_to_six_vertices(n):
    for g in _all_graphs(n):
        _check_girth_by_common_neighbours(g)


def test_girth_common_neighbours_sampled_seven_vertices(rng):
    for _ in range(3000):
        _check_girth_by_common_neighbours(random_graph(rng, 7, rng.random()))


def test_girth_matches_cycle_search(rng):
    for _ in range(300):
        g = random_graph(rng, rng.randint(1, 8), rng.random() * 0.6)
        assert girth(g) == naive_girth(g)


# -- properties ------------------------------------------------------------------


small_weights = st.integers(min_value=-5, max_value=5)


@st.composite
def games(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    rows = [[0 if i == j else draw(small_weights) for j in range(n)] for i in range(n)]
    return Game(rows)


@settings(max_examples=150, deadline=None)
@given(games(), st.data())
def test_valuation_shift_leaves_preferences_unchanged(g, data):
    n = g.n
    shifts = [data.draw(st.fractions(min_value=-10, max_value=10, max_denominator=7)) for _ in range(n)]
    raw = [[g.valuations[i][j] + shifts[i] for j in range(n)] for i in range(n)]
    assert Game.from_unnormalized(raw) == g
    i = data.draw(st.integers(0, n - 1))
    coalition = st.lists(st.integers(0, n - 1), max_size=n).map(lambda xs: frozenset({i, *xs}))
    s, t = data.draw(coalition), data.draw(coalition)

    def raw_average(c):
        return Fraction(sum(raw[i][j] for j in c), len(c))

    # every average moves by the same constant, so comparisons survive
    assert raw_average(s) - raw_average(t) == utility(g, i, s) - utility(g, i, t)
    assert (prefers(g, i, s, t) is Preference.STRICTLY) == (raw_average(s) > raw_average(t))


@settings(max_examples=100, deadline=None)
@given(games(max_n=6), st.data())
def test_utility_matches_direct_average(g, data):
    i = data.draw(st.integers(0, g.n - 1))
    s = {i} | set(data.draw(st.lists(st.integers(0, g.n - 1))))
    assert utility(g, i, s) == naive_utility(g, i, s)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.data())
def test_simple_symmetric_utility_bounds(n, data):
    pairs = list(itertools.combinations(range(n), 2))
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    g = Game.from_edges(n, edges)
    s = set(data.draw(st.lists(st.integers(0, n - 1), min_size=1)))
    for i in s:
        assert 0 <= utility(g, i, s) <= Fraction(len(s) - 1, len(s))


@settings(max_examples=60, deadline=None)
@given(games(), st.data())
def test_prefers_is_a_total_preorder(g, data):
    i = data.draw(st.integers(0, g.n - 1))
    coalitions = [
        frozenset({i} | set(data.draw(st.lists(st.integers(0, g.n - 1), max_size=g.n))))
        for _ in range(4)
    ]
    for s, t in itertools.product(coalitions, repeat=2):
        assert prefers(g, i, s, t).weakly or prefers(g, i, t, s).weakly
    for s, t, u in itertools.product(coalitions, repeat=3):
        if prefers(g, i, s, t).weakly and prefers(g, i, t, u).weakly:
            assert prefers(g, i, s, u).weakly
