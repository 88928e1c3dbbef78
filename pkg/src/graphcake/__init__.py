"""Fair division of graphical cakes and chores with exact rational arithmetic."""

from .allocation import Allocation, VerificationReport, verify_allocation
from .errors import CakeError
from .fixtures import FixtureSpec, build_fixture, random_instance
from .graph_core import (
    CakeGraph,
    Interval,
    OrientedLabeling,
    Piece,
    classify_almost_bridgeless,
    compute_contiguous_labeling,
    find_bipolar_numbering,
    find_bridges,
    induced_cake,
    is_contiguous,
    piece_is_connected,
    split_cycles_to_tree,
)
from .oracle import GridSearchConfig, check_powers_of_three, grid_search_best, pair_feasible
from .protocols import (
    EntitlementResult,
    ProtocolResult,
    chore_three,
    chore_two,
    chore_upto5,
    connected_egalitarian,
    equitable_two,
    extract_piece,
    f_guarantee,
    height2_two_piece_proportional,
    multi_piece_two,
    proportional_two_connected,
    run_protocol,
    star_egalitarian,
    two_agent_best,
    two_agent_fixed,
    two_agent_flexible,
)
from .valuation import (
    Instance,
    QueryLog,
    Valuation,
    cut_query,
    restrict_and_renormalize,
    value_of_piece,
)

__all__ = [
    "Allocation",
    "CakeError",
    "CakeGraph",
    "EntitlementResult",
    "FixtureSpec",
    "GridSearchConfig",
    "Instance",
    "Interval",
    "OrientedLabeling",
    "Piece",
    "ProtocolResult",
    "QueryLog",
    "Valuation",
    "VerificationReport",
    "build_fixture",
    "check_powers_of_three",
    "chore_three",
    "chore_two",
    "chore_upto5",
    "classify_almost_bridgeless",
    "compute_contiguous_labeling",
    "connected_egalitarian",
    "cut_query",
    "equitable_two",
    "extract_piece",
    "f_guarantee",
    "find_bipolar_numbering",
    "find_bridges",
    "grid_search_best",
    "height2_two_piece_proportional",
    "induced_cake",
    "is_contiguous",
    "multi_piece_two",
    "pair_feasible",
    "piece_is_connected",
    "proportional_two_connected",
    "random_instance",
    "restrict_and_renormalize",
    "run_protocol",
    "split_cycles_to_tree",
    "star_egalitarian",
    "two_agent_best",
    "two_agent_fixed",
    "two_agent_flexible",
    "value_of_piece",
    "verify_allocation",
]
