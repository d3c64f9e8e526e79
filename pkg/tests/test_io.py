import random
from fractions import Fraction

import pytest

from fhg.instances import GADGETS, gadget, gadget_info
from fhg.io import GameFileError, parse_game, parse_partition, serialize_game, serialize_partition
from fhg.model import Game, Partition, SupportedGame
from fhg.stability import enumerate_partitions

DIGRAPH5 = """\
# five players around a cycle
fhg 5 directed weighted
default -10
1 2 2
1 5 1
2 3 2
2 1 1
3 4 2
3 2 1
4 5 2
4 3 1
5 1 2
5 4 1
"""


def test_single_edge():
    g = parse_game("fhg 2 undirected simple\n1 2\n")
    assert g == Game.from_edges(2, [(0, 1)])


def test_digraph_file_matches_gadget():
    assert parse_game(DIGRAPH5) == gadget("digraph-5")


def test_exact_weights():
    g = parse_game("fhg 3 undirected weighted\n1 2 0.1\n2 3 -7/3\n")
    assert g.valuations[0][1] == g.valuations[1][0] == Fraction(1, 10)
    assert g.valuations[2][1] == Fraction(-7, 3)
    assert g.valuations[0][2] == 0


def test_subsidies_make_a_supported_game():
    g = parse_game("fhg 3 undirected simple\n1 2\nsubsidy 3 4\n")
    assert isinstance(g, SupportedGame) and g.subsidies == {2: 4}


@pytest.mark.parametrize(
    "text,line,message",
    [
        ("fhg 3 directed weighted\n1 2 1.2.3\n", 2, "malformed weight"),
        ("fhg 3 undirected simple\n1 1\n", 2, "self-loop"),
        ("fhg 3 undirected simple\n1 2\n2 1\n", 3, "duplicate"),
        ("fhg 3 directed weighted\n1 2 1\n1 2 3\n", 3, "duplicate"),
        ("fhg 3 undirected simple\n1 2 5\n", 2, "simple"),
        ("fhg 3 undirected weighted\n1 2\n", 2, "missing weight"),
        ("fhg 3 undirected simple\n1 4\n", 2, "outside"),
        ("fhg x undirected simple\n", 1, "integer"),
        ("fhg 3 sideways simple\n", 1, "header"),
        ("fhg 3 undirected simple\ndefault 2\n", 2, "default"),
        ("fhg 3 undirected simple\nsubsidy 1 x\n", 2, "subsidy"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, message):
    with pytest.raises(GameFileError, match=message) as info:
        parse_game(text)
    assert info.value.line == line


def test_directed_pairs_are_not_duplicates():
    g = parse_game("fhg 2 directed simple\n1 2\n2 1\n")
    assert g.is_symmetric and g.is_simple


def test_edge_list_fallback():
    g = parse_game("# plain\n1 2\n2 3\n")
    assert g == Game.from_edges(3, [(0, 1), (1, 2)])
    with pytest.raises(GameFileError):
        parse_game("1 2 3\n")


def test_empty_file():
    with pytest.raises(GameFileError):
        parse_game("# nothing\n")


@pytest.mark.parametrize("name", sorted(GADGETS))
def test_gadget_round_trip(name):
    g = gadget(name)
    assert parse_game(serialize_game(g)) == g


def test_supported_and_random_weighted_round_trip():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randint(1, 6)
        vals = [[0 if i == j else Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for j in range(n)] for i in range(n)]
        g = Game(vals)
        assert parse_game(serialize_game(g)) == g
    sg = SupportedGame(Game.from_edges(3, [(0, 1)]), {1: 5})
    assert parse_game(serialize_game(sg)) == sg


def test_serializer_writes_p_over_q():
    g = Game.from_weights(3, {(0, 1): Fraction(1, 3)}, symmetric=True)
    assert "1 2 1/3" in serialize_game(g).splitlines()
    assert "default 1/3" in serialize_game(Game.from_weights(2, {(0, 1): Fraction(1, 3)}, symmetric=True))


# -- partitions --------------------------------------------------------------------


def test_partition_format():
    p = Partition([[0, 1, 2], [3, 4, 5]], 6)
    assert serialize_partition(p) == "1 2 3\n4 5 6\n"
    assert parse_partition("1 2 3\n4 5 6\n", 6) == p


def test_partition_errors():
    with pytest.raises(GameFileError, match="missing"):
        parse_partition("1 2 3\n4 5\n", 6)
    with pytest.raises(GameFileError, match="already"):
        parse_partition("1 2\n2 3\n", 3)
    with pytest.raises(GameFileError, match="outside"):
        parse_partition("1 2 4\n", 3)


def test_partition_round_trip_random():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 12)
        p = Partition.from_labels([rng.randrange(n) for _ in range(n)])
        assert parse_partition(serialize_partition(p), n) == p


def test_partition_round_trip_enumerated():
    for p in enumerate_partitions(6):
        assert parse_partition(serialize_partition(p), 6) == p


def test_gadget_partitions_round_trip():
    for name in GADGETS:
        info = gadget_info(name)
        if info.partition is not None:
            assert parse_partition(serialize_partition(info.partition), info.game) == info.partition
