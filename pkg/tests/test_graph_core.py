import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphcake.errors import (
    BudgetExceeded,
    DisconnectedPiece,
    GraphConstructionError,
    MalformedPiece,
    NotAlmostBridgeless,
)
from graphcake.graph_core import (
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
    piece_component_count,
    piece_is_connected,
    split_cycles_to_tree,
)

from conftest import edge_piece, path_graph, random_multigraph, single_edge_graph, star_graph, triangle

F = Fraction


# -- construction ------------------------------------------------------------


def test_rejects_loops_and_disconnection():
    with pytest.raises(GraphConstructionError):
        CakeGraph(["a"], [("e0", "a", "a")])
    with pytest.raises(GraphConstructionError):
        CakeGraph(["a", "b", "c", "d"], [("e0", "a", "b"), ("e1", "c", "d")])
    with pytest.raises(GraphConstructionError):
        CakeGraph(["a", "b"], [])


def test_parallel_edges_allowed():
    g = CakeGraph(["a", "b"], [("e0", "a", "b"), ("e1", "a", "b")])
    assert g.m == 2


def test_graph_json_round_trip():
    g = triangle()
    assert CakeGraph.from_json(g.to_json()).to_json() == g.to_json()


# -- pieces ------------------------------------------------------------------


def test_piece_canonicalization_merges_and_drops():
    p = Piece.of(
        [
            Interval("e0", F(1, 2), F(1, 2)),
            Interval("e0", F(0), F(1, 4)),
            Interval("e0", F(1, 4), F(1, 2)),
            Interval("e1", F(1, 3), F(2, 3)),
        ]
    )
    assert p.intervals == (
        Interval("e0", F(0), F(1, 2)),
        Interval("e1", F(1, 3), F(2, 3)),
    )


def test_piece_rejects_bad_bounds():
    with pytest.raises(MalformedPiece):
        Piece.of([Interval("e0", F(-1, 2), F(1, 2))])
    with pytest.raises(MalformedPiece):
        Piece.of([Interval("e0", F(0), F(3, 2))])


def test_piece_difference_is_exact():
    whole = Piece.of([Interval("e0", F(0), F(1))])
    middle = Piece.of([Interval("e0", F(1, 4), F(1, 2))])
    rest = whole.difference(middle)
    assert rest.intervals == (
        Interval("e0", F(0), F(1, 4)),
        Interval("e0", F(1, 2), F(1)),
    )
    assert rest.union(middle).intervals == whole.intervals


@settings(max_examples=200, deadline=None)
@given(
    st.lists(
        st.tuples(
            st.sampled_from(["e0", "e1"]),
            st.integers(0, 12),
            st.integers(0, 12),
        ),
        max_size=6,
    )
)
def test_piece_union_difference_partition_measure(raw):
    intervals = [
        Interval(e, F(min(a, b), 12), F(max(a, b), 12)) for e, a, b in raw
    ]
    p = Piece.of(intervals)
    whole = Piece.of([Interval("e0", F(0), F(1)), Interval("e1", F(0), F(1))])
    q = whole.difference(p)
    assert p.measure() + q.measure() == whole.measure()
    assert p.union(q).intervals == whole.intervals


# -- piece connectivity ------------------------------------------------------


def test_two_star_halves_meeting_at_center_connected():
    g = star_graph(3)
    p = Piece.of([Interval("e0", F(0), F(1, 2)), Interval("e1", F(0), F(1, 2))])
    assert piece_is_connected(g, p)


def test_gap_on_one_edge_disconnected():
    g = single_edge_graph()
    p = Piece.of([Interval("e0", F(0), F(1, 4)), Interval("e0", F(1, 2), F(1))])
    assert not piece_is_connected(g, p)
    assert piece_component_count(g, p) == 2


def test_triangle_minus_interior_interval_connected():
    g = triangle()
    p = g.whole_piece().difference(Piece.of([Interval("e1", F(1, 4), F(1, 2))]))
    assert piece_is_connected(g, p)


def test_empty_piece_connected():
    assert piece_is_connected(single_edge_graph(), Piece.empty())


# -- bridges -----------------------------------------------------------------


def test_bridges_examples():
    assert find_bridges(triangle()) == set()
    assert find_bridges(star_graph(3)) == {"e0", "e1", "e2"}
    assert find_bridges(path_graph(3)) == {"e0", "e1", "e2"}
    # parallel edges never bridge
    g = CakeGraph(["a", "b", "c"], [("e0", "a", "b"), ("e1", "a", "b"), ("e2", "b", "c")])
    assert find_bridges(g) == {"e2"}


def test_flower_graph_is_bridgeless():
    from graphcake.fixtures import FixtureSpec, build_fixture

    inst = build_fixture(FixtureSpec("fig1_flowers", {"side": "left"}))
    assert inst.graph.m == 9
    assert find_bridges(inst.graph) == set()


def _bridges_by_deletion(g: CakeGraph) -> set:
    out = set()
    for e in g.edges:
        kept = [(x.id, x.u, x.v) for x in g.edges if x.id != e.id]
        touched = {v for _, u, w in kept for v in (u, w)}
        if len(touched) < len(g.vertices):
            out.add(e.id)
            continue
        try:
            CakeGraph(sorted(touched), kept)
        except GraphConstructionError:
            out.add(e.id)
    return out


def test_bridges_match_deletion_oracle_on_random_graphs():
    rng = random.Random(20240)
    for _ in range(120):
        g = random_multigraph(rng, max_edges=8)
        assert find_bridges(g) == _bridges_by_deletion(g), g.to_json()


# -- almost-bridgeless classification ----------------------------------------


def test_classify_examples():
    w = classify_almost_bridgeless(path_graph(3))
    assert w.is_almost_bridgeless and set(w.endpoints) == {"v0", "v3"}
    w = classify_almost_bridgeless(star_graph(3))
    assert not w.is_almost_bridgeless and set(w.obstruction) == {"e0", "e1", "e2"}
    w = classify_almost_bridgeless(triangle())
    assert w.is_almost_bridgeless
    x, y = w.endpoints
    assert {x, y} <= {"a", "b", "c"} and x != y


def _add_edge(g: CakeGraph, x: str, y: str) -> CakeGraph:
    edges = [(e.id, e.u, e.v) for e in g.edges] + [("@new", x, y)]
    return CakeGraph(g.vertices, edges)


def _simple_paths_edges(g: CakeGraph):
    """Edge sets of all simple paths (distinct vertices) in a small graph."""
    for start in g.vertices:
        stack = [(start, {start}, frozenset())]
        while stack:
            at, seen, used = stack.pop()
            yield used
            for e in g.incident(at):
                w = e.other(at)
                if w not in seen:
                    stack.append((w, seen | {w}, used | {e.id}))


def test_classification_witnesses_on_random_graphs():
    rng = random.Random(77)
    for _ in range(80):
        g = random_multigraph(rng, max_edges=6)
        w = classify_almost_bridgeless(g)
        if w.is_almost_bridgeless:
            assert find_bridges(_add_edge(g, *w.endpoints)) == set()
        else:
            three = set(w.obstruction)
            assert all(len(three & path) < 3 for path in _simple_paths_edges(g))


# -- oriented labelings --------------------------------------------------------


def test_single_edge_labeling():
    g = single_edge_graph()
    lab = compute_contiguous_labeling(g)
    assert lab.order == ("e0",)
    assert is_contiguous(g, lab)


def test_triangle_labeling_head_to_tail_passes():
    g = triangle()
    lab = OrientedLabeling(("e0", "e1", "e2"), {"e0": "a", "e1": "b", "e2": "c"})
    assert is_contiguous(g, lab)


def test_triangle_labeling_reversed_middle_fails():
    g = triangle()
    lab = OrientedLabeling(("e0", "e1", "e2"), {"e0": "a", "e1": "c", "e2": "c"})
    assert not is_contiguous(g, lab)


def test_computed_labelings_pass_predicate():
    from graphcake.fixtures import random_instance

    for seed in range(40):
        g = random_instance(seed, n=1, family="cycle-augmented", edges=7).graph
        lab = compute_contiguous_labeling(g)
        assert is_contiguous(g, lab)


def test_labeling_refused_off_class():
    with pytest.raises(NotAlmostBridgeless):
        compute_contiguous_labeling(star_graph(3))


def test_flower_graphs_admit_labelings():
    from graphcake.fixtures import FixtureSpec, build_fixture

    for side in ("left", "right"):
        g = build_fixture(FixtureSpec("fig1_flowers", {"side": side})).graph
        assert is_contiguous(g, compute_contiguous_labeling(g))


# -- bipolar numberings --------------------------------------------------------


def test_bipolar_single_edge():
    res = find_bipolar_numbering(single_edge_graph())
    assert res.found and res.numbering.labels == {"a": 1, "b": 2}


def test_bipolar_triangle_exists():
    assert find_bipolar_numbering(triangle()).found


def test_bipolar_budget():
    g = path_graph(11)
    with pytest.raises(BudgetExceeded):
        find_bipolar_numbering(g, budget=10)
    assert find_bipolar_numbering(g, budget=12).found


def test_bipolar_implies_almost_bridgeless_on_random_graphs():
    rng = random.Random(4242)
    for _ in range(60):
        g = random_multigraph(rng, max_edges=6)
        if find_bipolar_numbering(g).found:
            assert classify_almost_bridgeless(g).is_almost_bridgeless


def _numbering_is_bipolar(g, labels):
    k = len(g.vertices)
    for v in g.vertices:
        nbr_labels = [labels[w] for w in g.neighbors(v)]
        if labels[v] > 1 and not any(x < labels[v] for x in nbr_labels):
            return False
        if labels[v] < k and not any(x > labels[v] for x in nbr_labels):
            return False
    return True


def test_found_numberings_are_valid():
    rng = random.Random(99)
    for _ in range(40):
        g = random_multigraph(rng, max_edges=6)
        res = find_bipolar_numbering(g)
        if res.found:
            assert _numbering_is_bipolar(g, res.numbering.labels)


# -- cycle splitting -----------------------------------------------------------


def test_split_tree_is_identity():
    g = star_graph(3)
    tree, origin = split_cycles_to_tree(g)
    assert tree.to_json() == g.to_json()
    assert origin == {v: v for v in g.vertices}


def test_split_triangle_gives_path():
    g = triangle()
    tree, origin = split_cycles_to_tree(g)
    assert tree.m == 3 and len(tree.vertices) == 4
    assert find_bridges(tree) == {"e0", "e1", "e2"}
    assert set(origin.values()) <= set(g.vertices)


def test_split_star_with_doubled_edge():
    g = CakeGraph(
        ["c", "l0", "l1", "l2"],
        [("e0", "c", "l0"), ("e0b", "c", "l0"), ("e1", "c", "l1"), ("e2", "c", "l2")],
    )
    tree, _ = split_cycles_to_tree(g)
    assert tree.m == 4
    assert len(find_bridges(tree)) == 4
    assert len(tree.vertices) == len(tree.edges) + 1


def test_split_preserves_piece_connectivity_to_original():
    rng = random.Random(5)
    for _ in range(40):
        g = random_multigraph(rng, max_edges=6)
        tree, _ = split_cycles_to_tree(g)
        assert tree.m == g.m
        assert tree.is_tree()
        # a piece connected in the tree stays connected in the original graph
        ids = [e.id for e in tree.edges]
        take = rng.sample(ids, rng.randint(1, len(ids)))
        p = edge_piece(*take)
        if piece_is_connected(tree, p):
            assert piece_is_connected(g, p)


# -- induced subcakes ----------------------------------------------------------


def test_induced_whole_graph_is_isomorphic():
    g = triangle()
    sub, cmap = induced_cake(g, g.whole_piece())
    assert sub.m == 3
    assert cmap.piece_to_parent(sub.whole_piece()).intervals == g.whole_piece().intervals


def test_induced_half_edge_map():
    g = single_edge_graph()
    p = Piece.of([Interval("e0", F(0), F(1, 2))])
    sub, cmap = induced_cake(g, p)
    assert sub.m == 1
    rng = random.Random(1)
    for _ in range(10):
        t = F(rng.randint(0, 16), 16)
        edge, pos = cmap.point_to_parent(sub.edges[0].id, t)
        assert edge == "e0" and pos == t / 2


def test_induced_star_halves():
    g = star_graph(3)
    p = Piece.of([Interval("e0", F(0), F(1, 2)), Interval("e1", F(0), F(1, 2))])
    sub, cmap = induced_cake(g, p)
    assert sub.m == 2 and sub.star_center() == "c"
    back = cmap.piece_to_parent(sub.whole_piece())
    assert back.intervals == p.intervals
    assert back.measure() == p.measure()


def test_induced_rejects_disconnected_and_empty():
    g = single_edge_graph()
    with pytest.raises(DisconnectedPiece):
        induced_cake(g, Piece.empty())
    bad = Piece.of([Interval("e0", F(0), F(1, 4)), Interval("e0", F(1, 2), F(1))])
    with pytest.raises(DisconnectedPiece):
        induced_cake(g, bad)
