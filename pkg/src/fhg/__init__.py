"""Fractional hedonic games: exact utilities, core-stability search and solvers."""
from .model import (
    Game,
    Partition,
    Preference,
    Rational,
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
from .stability import (
    BlockingCertificate,
    Kind,
    SearchBudget,
    Verdict,
    core_nonempty_exhaustive,
    deviation_walk,
    enumerate_partitions,
    find_blocking,
    is_core_stable,
    is_strict_core_stable,
    stable_partitions,
)
from .solvers import (
    leximin_compare,
    phi_potential,
    solve_bakers_millers_finest,
    solve_bipartite_matching,
    solve_degree2,
    solve_forest,
    solve_star_packing,
)
from .instances import gadget, gadget_info, reduce_maxmin_clique, reduce_supported
from .io import parse_game, parse_partition, serialize_game, serialize_partition

__version__ = "0.1.0"
