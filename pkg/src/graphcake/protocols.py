"""Moving-knife protocols over graphical cakes and chores.

Every protocol returns an allocation plus a log of the evaluation and cut
queries it issued, and comes with an exact guarantee that the verifier in
:mod:`graphcake.allocation` can check with zero tolerance.

Deterministic tie-breaking throughout: when several agents qualify at the
same knife point, the lowest agent index wins; when several edges or branches
qualify, the one earliest in the graph's stored edge order wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .allocation import Allocation, VerificationReport
from .errors import (
    AlphaOutOfRange,
    DomainError,
    InsufficientValue,
    NotAStar,
    NotHeightTwoTree,
    LabelingNotContiguous,
    ProtocolInvariantError,
    TooManyAgents,
)
from .graph_core import (
    ONE,
    ZERO,
    CakeGraph,
    Edge,
    Interval,
    OrientedLabeling,
    Piece,
    SubcakeMap,
    classify_almost_bridgeless,
    compute_contiguous_labeling,
    induced_cake,
    is_contiguous,
    split_cycles_to_tree,
)
from .valuation import (
    Instance,
    Leg,
    QueryLog,
    Trajectory,
    TrajectoryCut,
    Valuation,
    combine_valuations,
    cut_trajectory,
    latest_position_within,
    restrict,
    restrict_and_renormalize,
    trajectory_prefix_piece,
    value_of_piece,
)

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)

Lift = Callable[[Piece], Piece]


def _identity_lift(p: Piece) -> Piece:
    return p


def _compose_lift(outer: Lift, cmap: SubcakeMap) -> Lift:
    def lifted(p: Piece) -> Piece:
        return outer(cmap.piece_to_parent(p))

    return lifted


@dataclass(frozen=True)
class ProtocolResult:
    allocation: Allocation
    queries: QueryLog


@dataclass(frozen=True)
class EntitlementResult:
    """Allocation plus a note of which agent received which guarantee."""

    allocation: Allocation
    alpha_agent: int
    beta_agent: int
    queries: QueryLog


def _require(inst: Instance, *, mode: str, n: Optional[int] = None) -> None:
    if inst.mode != mode:
        raise DomainError(f"protocol requires {mode} mode, instance is {inst.mode}")
    if n is not None and inst.n != n:
        raise DomainError(f"protocol requires exactly {n} agents, instance has {inst.n}")


# ---------------------------------------------------------------------------
# Rooted trees
# ---------------------------------------------------------------------------


class _RootedTree:
    """Rooted view of a tree graph; children are ordered by stored edge order."""

    def __init__(self, tree: CakeGraph, root: str):
        self.tree = tree
        self.root = root
        self.children: dict[str, list[tuple[Edge, str]]] = {v: [] for v in tree.vertices}
        self.parent: dict[str, str] = {}
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for e in tree.incident(v):
                w = e.other(v)
                if w not in seen:
                    seen.add(w)
                    self.children[v].append((e, w))
                    self.parent[w] = v
                    stack.append(w)

    def subtree_edges(self, v: str) -> list[Edge]:
        out: list[Edge] = []
        stack = [v]
        while stack:
            a = stack.pop()
            for e, w in self.children[a]:
                out.append(e)
                stack.append(w)
        return out

    def subtree_piece(self, v: str) -> Piece:
        return Piece.of(Interval(e.id, ZERO, ONE) for e in self.subtree_edges(v))

    def branch_piece(self, edge: Edge, child: str) -> Piece:
        return self.subtree_piece(child).union(Piece.of([Interval(edge.id, ZERO, ONE)]))

    def subtree_values(self, val: Valuation) -> dict[str, Fraction]:
        """Value of the subtree strictly below each vertex, computed bottom-up."""
        order: list[str] = []
        stack = [self.root]
        while stack:
            v = stack.pop()
            order.append(v)
            for _, w in self.children[v]:
                stack.append(w)
        values: dict[str, Fraction] = {}
        for v in reversed(order):
            acc = ZERO
            for e, w in self.children[v]:
                acc += val.edge_value(e.id) + values[w]
            values[v] = acc
        return values

    def depth_map(self) -> dict[str, int]:
        depth = {self.root: 0}
        stack = [self.root]
        while stack:
            v = stack.pop()
            for _, w in self.children[v]:
                depth[w] = depth[v] + 1
                stack.append(w)
        return depth


# ---------------------------------------------------------------------------
# Piece extraction (the workhorse behind most protocols)
# ---------------------------------------------------------------------------


def _extract(
    g: CakeGraph,
    vals: Sequence[Valuation],
    sub: Piece,
    alpha: Fraction,
    eligible: Sequence[int],
    log: QueryLog,
) -> tuple[Piece, int, Piece]:
    """Split ``sub`` into two connected pieces; the winner values the first at
    least ``alpha`` while every other eligible agent values it at most ``2*alpha``.

    Route: induce the subcake, detach cycle edges into a tree, walk down to the
    lowest vertex whose subtree still reaches ``alpha`` for someone, then either
    sweep a knife along one branch (stopping at the earliest crossing) or
    accumulate whole branches until the first crossing.
    """
    if alpha < 0:
        raise DomainError(f"extraction threshold {alpha} is negative")
    eligible = sorted(eligible)
    for a in eligible:
        if value_of_piece(vals[a], sub, log) < alpha:
            raise InsufficientValue(f"agent {a} values the piece below {alpha}")
    if alpha == 0:
        return Piece.empty(), eligible[0], sub

    sub_graph, smap = induced_cake(g, sub)
    rvals = {a: restrict(vals[a], smap) for a in eligible}
    tree, _ = split_cycles_to_tree(sub_graph)
    rt = _RootedTree(tree, min(tree.vertices))
    stv = {a: rt.subtree_values(rvals[a]) for a in eligible}
    log.eval_count += tree.m * len(eligible)

    v = rt.root
    while True:
        nxt = next(
            (
                child
                for _, child in rt.children[v]
                if any(stv[a][child] >= alpha for a in eligible)
            ),
            None,
        )
        if nxt is None:
            break
        v = nxt

    chosen: Optional[tuple[Edge, str, dict[int, Fraction]]] = None
    for edge, child in rt.children[v]:
        branch_vals = {
            a: stv[a][child] + rvals[a].edge_value(edge.id) for a in eligible
        }
        if any(bv >= alpha for bv in branch_vals.values()):
            chosen = (edge, child, branch_vals)
            break

    if chosen is not None:
        # Case 1: sweep a knife from the child end of the branch towards v.
        edge, w, branch_vals = chosen
        leg = Leg(edge.id, edge.endpoint_position(w), edge.endpoint_position(v))
        best: Optional[tuple[Fraction, int, TrajectoryCut]] = None
        for a in eligible:
            if branch_vals[a] < alpha:
                continue
            cut = cut_trajectory(tree, rvals[a], (leg,), alpha - stv[a][w], log)
            if best is None or cut.sweep_offset < best[0]:
                best = (cut.sweep_offset, a, cut)
        assert best is not None
        _, winner, cut = best
        piece_tree = rt.subtree_piece(w).union(trajectory_prefix_piece((leg,), cut))
    else:
        # Case 2: accumulate whole branches until some agent first reaches alpha.
        acc = Piece.empty()
        acc_vals = {a: ZERO for a in eligible}
        winner = None
        for edge, child in rt.children[v]:
            acc = acc.union(rt.branch_piece(edge, child))
            for a in eligible:
                acc_vals[a] += stv[a][child] + rvals[a].edge_value(edge.id)
            crossers = [a for a in eligible if acc_vals[a] >= alpha]
            if crossers:
                winner = crossers[0]
                break
        if winner is None:
            raise ProtocolInvariantError("branch accumulation never reached the threshold")
        piece_tree = acc

    remainder_tree = tree.whole_piece().difference(piece_tree)
    return (
        smap.piece_to_parent(piece_tree),
        winner,
        smap.piece_to_parent(remainder_tree),
    )


def extract_piece(
    inst: Instance,
    sub: Piece,
    alpha: Fraction,
    eligible: Optional[Iterable[int]] = None,
    log: Optional[QueryLog] = None,
) -> tuple[Piece, int, Piece]:
    """Public wrapper over the extraction routine, on an instance's own agents."""
    log = log if log is not None else QueryLog()
    who = sorted(eligible) if eligible is not None else list(range(inst.n))
    return _extract(inst.graph, inst.agents, sub, alpha, who, log)


# ---------------------------------------------------------------------------
# Egalitarian guarantee for any number of agents
# ---------------------------------------------------------------------------


def _egal_rec(
    g: CakeGraph,
    vals: list[Valuation],
    idx: list[int],
    lift: Lift,
    pieces: list[Piece],
    log: QueryLog,
) -> None:
    k = len(idx)
    if k == 1:
        pieces[idx[0]] = lift(g.whole_piece())
        return
    alpha = Fraction(1, 2 * k - 1)
    piece, w, rem = _extract(g, vals, g.whole_piece(), alpha, range(k), log)
    pieces[idx[w]] = lift(piece)
    sub_g, smap = induced_cake(g, rem)
    new_vals = [restrict_and_renormalize(vals[a], smap) for a in range(k) if a != w]
    new_idx = [idx[a] for a in range(k) if a != w]
    _egal_rec(sub_g, new_vals, new_idx, _compose_lift(lift, smap), pieces, log)


def connected_egalitarian(inst: Instance) -> ProtocolResult:
    """Connected allocation giving every one of n agents at least 1/(2n-1).

    Extract a piece for one agent at threshold 1/(2n-1), renormalize the rest,
    and recurse on the remaining agents.
    """
    _require(inst, mode="cake")
    log = QueryLog()
    pieces: list[Piece] = [Piece.empty()] * inst.n
    _egal_rec(
        inst.graph, list(inst.agents), list(range(inst.n)), _identity_lift, pieces, log
    )
    return ProtocolResult(Allocation(tuple(pieces)), log)


# ---------------------------------------------------------------------------
# Stars
# ---------------------------------------------------------------------------


def f_guarantee(n: int, k: int) -> Fraction:
    """Optimal egalitarian guarantee for n agents on a star with k edges."""
    if n < 2 or k < 3:
        raise DomainError(f"f(n, k) needs n >= 2 and k >= 3, got ({n}, {k})")
    if k < 2 * n - 1:
        return Fraction(1, n + (k + 1) // 2 - 1)
    return Fraction(1, 2 * n - 1)


def _path_trajectory(g: CakeGraph) -> Trajectory:
    """End-to-end sweep of a path graph, starting from its first leaf."""
    if g.m == 1:
        e = g.edges[0]
        return (Leg(e.id, ZERO, ONE),)
    leaves = sorted(v for v in g.vertices if g.degree(v) == 1)
    assert len(leaves) == 2, "graph is not a path"
    legs: list[Leg] = []
    at = leaves[0]
    used: set[str] = set()
    while True:
        e = next((x for x in g.incident(at) if x.id not in used), None)
        if e is None:
            break
        used.add(e.id)
        legs.append(Leg(e.id, e.endpoint_position(at), e.endpoint_position(e.other(at))))
        at = e.other(at)
    return tuple(legs)


def _traj_suffix(traj: Trajectory, cut: TrajectoryCut) -> Trajectory:
    leg = traj[cut.leg_index]
    rest = traj[cut.leg_index + 1 :]
    if cut.position == leg.end:
        return rest
    return (Leg(leg.edge, cut.position, leg.end),) + rest


def _path_proportional(
    g: CakeGraph,
    vals: list[Valuation],
    idx: list[int],
    lift: Lift,
    pieces: list[Piece],
    log: QueryLog,
) -> None:
    """Moving knife along a path: each agent stops at 1/n of her total."""
    k = len(idx)
    traj = _path_trajectory(g)
    target = Fraction(1, k)
    remaining = list(range(k))
    for _ in range(k - 1):
        best: Optional[tuple[Fraction, int, TrajectoryCut]] = None
        for a in remaining:
            try:
                cut = cut_trajectory(g, vals[a], traj, target, log)
            except InsufficientValue:  # pragma: no cover - ruled out by additivity
                continue
            if best is None or cut.sweep_offset < best[0]:
                best = (cut.sweep_offset, a, cut)
        assert best is not None
        _, winner, cut = best
        pieces[idx[winner]] = lift(trajectory_prefix_piece(traj, cut))
        remaining.remove(winner)
        traj = _traj_suffix(traj, cut)
    last = remaining[0]
    tail = Piece.of(
        Interval(l.edge, min(l.start, l.end), max(l.start, l.end)) for l in traj
    )
    pieces[idx[last]] = lift(tail)


def _star_rec(
    g: CakeGraph,
    vals: list[Valuation],
    idx: list[int],
    center: str,
    lift: Lift,
    pieces: list[Piece],
    log: QueryLog,
) -> None:
    k = len(idx)
    if k == 1:
        pieces[idx[0]] = lift(g.whole_piece())
        return
    m = g.m
    if m <= 2:
        _path_proportional(g, vals, idx, lift, pieces, log)
        return
    if m >= 2 * k - 1:
        _egal_rec(g, vals, idx, lift, pieces, log)
        return
    share = f_guarantee(k, m)
    log.eval_count += m
    edge = next(e for e in g.edges if vals[0].edge_value(e.id) >= share)
    outer = edge.other(center)
    leg = Leg(edge.id, edge.endpoint_position(outer), edge.endpoint_position(center))
    best: Optional[tuple[Fraction, int, TrajectoryCut]] = None
    for a in range(k):
        log.eval_count += 1
        if vals[a].edge_value(edge.id) < share:
            continue
        cut = cut_trajectory(g, vals[a], (leg,), share, log)
        if best is None or cut.sweep_offset < best[0]:
            best = (cut.sweep_offset, a, cut)
    assert best is not None
    _, winner, cut = best
    piece = trajectory_prefix_piece((leg,), cut)
    pieces[idx[winner]] = lift(piece)
    rem = g.whole_piece().difference(piece)
    sub_g, smap = induced_cake(g, rem)
    new_vals = [restrict_and_renormalize(vals[a], smap) for a in range(k) if a != winner]
    new_idx = [idx[a] for a in range(k) if a != winner]
    _star_rec(sub_g, new_vals, new_idx, center, _compose_lift(lift, smap), pieces, log)


def star_egalitarian(inst: Instance) -> ProtocolResult:
    """Connected allocation on a star with k >= 3 edges achieving the star guarantee.

    Wide stars delegate to the general egalitarian protocol; narrow stars sweep
    a knife from the outer endpoint of a valuable edge towards the center and
    recurse on one agent fewer.
    """
    _require(inst, mode="cake")
    if inst.n < 2:
        raise DomainError("the star protocol needs at least two agents")
    center = inst.graph.star_center()
    if center is None or inst.graph.m < 3:
        raise NotAStar("graph is not a star with at least three edges")
    log = QueryLog()
    pieces: list[Piece] = [Piece.empty()] * inst.n
    _star_rec(
        inst.graph,
        list(inst.agents),
        list(range(inst.n)),
        center,
        _identity_lift,
        pieces,
        log,
    )
    return ProtocolResult(Allocation(tuple(pieces)), log)


# ---------------------------------------------------------------------------
# Two agents, one connected piece each
# ---------------------------------------------------------------------------


def proportional_two_connected(inst: Instance, lab: OrientedLabeling) -> ProtocolResult:
    """Proportional connected allocation for two agents via one knife sweep.

    The knife follows the contiguous labeling edge by edge; whoever first sees
    value 1/2 in the covered prefix takes it, the other agent takes the suffix.
    """
    _require(inst, mode="cake", n=2)
    if not is_contiguous(inst.graph, lab):
        raise LabelingNotContiguous("the supplied labeling fails the contiguity check")
    g = inst.graph
    traj = tuple(
        Leg(
            e,
            g.edge(e).endpoint_position(lab.tails[e]),
            g.edge(e).endpoint_position(lab.head(g, e)),
        )
        for e in lab.order
    )
    log = QueryLog()
    best: Optional[tuple[Fraction, int, TrajectoryCut]] = None
    for a in range(2):
        cut = cut_trajectory(g, inst.agents[a], traj, HALF, log)
        if best is None or cut.sweep_offset < best[0]:
            best = (cut.sweep_offset, a, cut)
    _, winner, cut = best  # type: ignore[misc]
    prefix = trajectory_prefix_piece(traj, cut)
    suffix = g.whole_piece().difference(prefix)
    pieces = (prefix, suffix) if winner == 0 else (suffix, prefix)
    return ProtocolResult(Allocation(pieces), log)


def _fixed_pair(
    g: CakeGraph, first: Valuation, second: Valuation, log: QueryLog
) -> tuple[Piece, Piece]:
    """Cut-and-choose core: split so both parts are worth >= 1/3 to ``second``,
    then ``first`` takes her preferred part."""
    piece, _, rem = _extract(g, [second, second], g.whole_piece(), THIRD, [0, 1], log)
    if value_of_piece(first, piece, log) >= value_of_piece(first, rem, log):
        return piece, rem
    return rem, piece


def two_agent_fixed(inst: Instance) -> ProtocolResult:
    """Connected allocation giving agent 1 at least 1/2 and agent 2 at least 1/3."""
    _require(inst, mode="cake", n=2)
    log = QueryLog()
    a1, a2 = _fixed_pair(inst.graph, inst.agents[0], inst.agents[1], log)
    return ProtocolResult(Allocation((a1, a2)), log)


def two_agent_best(inst: Instance) -> ProtocolResult:
    """The optimal guarantee for the instance's graph: 1/2 on almost bridgeless
    graphs (proportional), otherwise 1/3 with agent 1 still receiving 1/2."""
    _require(inst, mode="cake", n=2)
    witness = classify_almost_bridgeless(inst.graph)
    if witness.is_almost_bridgeless:
        lab = compute_contiguous_labeling(inst.graph)
        return proportional_two_connected(inst, lab)
    return two_agent_fixed(inst)


def two_agent_flexible(inst: Instance, alpha: Fraction) -> EntitlementResult:
    """Connected allocation where one agent gets >= alpha and the other >= 1-2*alpha,
    without fixing in advance which agent gets which share."""
    _require(inst, mode="cake", n=2)
    alpha = Fraction(alpha)
    if not 0 < alpha <= Fraction(1, 4):
        raise AlphaOutOfRange(f"alpha must satisfy 0 < alpha <= 1/4, got {alpha}")
    log = QueryLog()
    piece, winner, rem = _extract(
        inst.graph, inst.agents, inst.graph.whole_piece(), alpha, [0, 1], log
    )
    other = 1 - winner
    pieces = (piece, rem) if winner == 0 else (rem, piece)
    return EntitlementResult(Allocation(pieces), winner, other, log)


# ---------------------------------------------------------------------------
# More connected pieces
# ---------------------------------------------------------------------------


def multi_piece_two(inst: Instance, k: int) -> ProtocolResult:
    """Two agents, at most k+1 connected pieces in total, welfare >= 1/2 - 1/(2*3^k).

    Repeatedly rebalance the first agent's split of the cake: move a small
    connected chunk (one third to two thirds of twice the deficit) from the
    richer part to the poorer one, shrinking the deficit by a factor of three
    per extra piece.  The second agent then picks her preferred part.
    """
    _require(inst, mode="cake", n=2)
    if k < 1:
        raise DomainError(f"piece budget k must be >= 1, got {k}")
    g = inst.graph
    f1, f2 = inst.agents
    log = QueryLog()
    piece, _, rem = _extract(g, [f1, f1], g.whole_piece(), THIRD, [0, 1], log)
    parts: list[list[Piece]] = [[piece], [rem]]
    for _ in range(k - 1):
        totals = [
            sum((value_of_piece(f1, p, log) for p in part), ZERO) for part in parts
        ]
        deficit = HALF - min(totals)
        if deficit == 0:
            break
        rich = parts[0] if totals[0] > totals[1] else parts[1]
        poor = parts[1] if rich is parts[0] else parts[0]
        h_pos = max(
            range(len(rich)), key=lambda i: (value_of_piece(f1, rich[i], log), -i)
        )
        chunk, _, h_rem = _extract(
            g, [f1, f1], rich[h_pos], 2 * deficit / 3, [0, 1], log
        )
        if h_rem.is_empty():
            del rich[h_pos]
        else:
            rich[h_pos] = h_rem
        poor.append(chunk)
    union0 = Piece.of(iv for p in parts[0] for iv in p.intervals)
    union1 = Piece.of(iv for p in parts[1] for iv in p.intervals)
    if value_of_piece(f2, union0, log) >= value_of_piece(f2, union1, log):
        alloc = Allocation((union1, union0))
    else:
        alloc = Allocation((union0, union1))
    return ProtocolResult(alloc, log)


def height2_two_piece_proportional(inst: Instance, root: str) -> ProtocolResult:
    """Proportional allocation with at most two connected pieces per agent on a
    tree of height at most two.

    The knife visits each child branch in turn: down every grandchild edge
    from the child, then up the child edge towards the root; it stops at the
    first point some agent values the covered part exactly 1/2.
    """
    _require(inst, mode="cake", n=2)
    g = inst.graph
    if not g.is_tree() or root not in g.vertices:
        raise NotHeightTwoTree(f"graph is not a tree rooted at {root!r}")
    rt = _RootedTree(g, root)
    if any(d > 2 for d in rt.depth_map().values()):
        raise NotHeightTwoTree(f"tree has height greater than two from {root!r}")
    legs: list[Leg] = []
    for e, child in rt.children[root]:
        for e2, grandchild in rt.children[child]:
            legs.append(
                Leg(e2.id, e2.endpoint_position(child), e2.endpoint_position(grandchild))
            )
        legs.append(Leg(e.id, e.endpoint_position(child), e.endpoint_position(root)))
    traj = tuple(legs)
    log = QueryLog()
    best: Optional[tuple[Fraction, int, TrajectoryCut]] = None
    for a in range(2):
        cut = cut_trajectory(g, inst.agents[a], traj, HALF, log)
        if best is None or cut.sweep_offset < best[0]:
            best = (cut.sweep_offset, a, cut)
    _, winner, cut = best  # type: ignore[misc]
    covered = trajectory_prefix_piece(traj, cut)
    rest = g.whole_piece().difference(covered)
    pieces = (covered, rest) if winner == 0 else (rest, covered)
    return ProtocolResult(Allocation(pieces), log)


# ---------------------------------------------------------------------------
# Equitability
# ---------------------------------------------------------------------------


def equitable_two(inst: Instance) -> ProtocolResult:
    """Complete connected allocation for two agents with inequity at most 1/3.

    Run the extraction machinery on the averaged measure (f1+f2)/2 at threshold
    1/3; the extracted piece goes to agent 1, so f1(A1)+f2(A1) lands in
    [2/3, 4/3] and the value difference is at most 1/3.
    """
    _require(inst, mode="cake", n=2)
    combined = combine_valuations(list(inst.agents), [HALF, HALF])
    log = QueryLog()
    piece, _, rem = _extract(
        inst.graph, [combined, combined], inst.graph.whole_piece(), THIRD, [0, 1], log
    )
    return ProtocolResult(Allocation((piece, rem)), log)


# ---------------------------------------------------------------------------
# Chore division
# ---------------------------------------------------------------------------


def chore_two(inst: Instance) -> ProtocolResult:
    """Two-agent chore division: costs at most 1/2 for agent 1 and 2/3 for agent 2.

    Treat costs as cake values, run the cut-and-choose split, and let the
    agents swap their pieces.
    """
    _require(inst, mode="chore", n=2)
    log = QueryLog()
    first_part, second_part = _fixed_pair(inst.graph, inst.agents[0], inst.agents[1], log)
    return ProtocolResult(Allocation((second_part, first_part)), log)


def chore_three(inst: Instance) -> ProtocolResult:
    """Three-agent chore division with egalitarian cost at most 1/2.

    Split between agents 1 and 2 as in the two-agent protocol, then divide
    agent 2's piece again between agents 3 and 2.
    """
    _require(inst, mode="chore", n=3)
    f1, f2, f3 = inst.agents
    g = inst.graph
    log = QueryLog()
    part_one, part_two = _fixed_pair(g, f1, f2, log)
    a1 = part_two  # swap
    b = part_one
    cost3 = value_of_piece(f3, b, log)
    cost2 = value_of_piece(f2, b, log)
    if cost3 == 0:
        return ProtocolResult(Allocation((a1, Piece.empty(), b)), log)
    if cost2 == 0:  # pragma: no cover - the swap leaves agent 2 cost >= 1/3 here
        return ProtocolResult(Allocation((a1, b, Piece.empty())), log)
    sub_g, smap = induced_cake(g, b)
    r3 = restrict_and_renormalize(f3, smap)
    r2 = restrict_and_renormalize(f2, smap)
    inner_first, inner_second = _fixed_pair(sub_g, r3, r2, log)
    a3 = smap.piece_to_parent(inner_second)  # swap again
    a2 = smap.piece_to_parent(inner_first)
    return ProtocolResult(Allocation((a1, a2, a3)), log)


def _cond1_thresholds(k: int) -> list[Fraction]:
    return [Fraction(1, k + 1)] + [Fraction(i - 1, k + 1) for i in range(2, k + 1)]


def _cond1_holds(sorted_costs: Sequence[Fraction], k: int) -> bool:
    return all(c <= t for c, t in zip(sorted_costs, _cond1_thresholds(k)))


def _cond2_holds(sorted_costs: Sequence[Fraction], k: int) -> bool:
    head = all(
        sorted_costs[i - 1] > Fraction(i + 1, k + 1) for i in range(1, k)
    )
    return head and sorted_costs[k - 1] > Fraction(k, k + 1)


def _sorted_costs(
    vals: Sequence[Valuation], piece: Piece, log: QueryLog
) -> list[tuple[Fraction, int]]:
    costs = [(value_of_piece(vals[a], piece, log), a) for a in range(len(vals))]
    return sorted(costs)


def _divide_group(
    g: CakeGraph,
    vals: list[Valuation],
    piece: Piece,
    group: list[int],
    idx: list[int],
    lift: Lift,
    pieces: list[Piece],
    log: QueryLog,
) -> None:
    """Allocate a connected piece of chore entirely within a group of agents.

    A group member with zero cost absorbs the whole piece for free; otherwise
    the piece becomes a renormalized sub-chore solved recursively.
    """
    if piece.is_empty():
        for a in group:
            pieces[idx[a]] = Piece.empty()
        return
    costs = [(value_of_piece(vals[a], piece, log), a) for a in group]
    zero_agents = [a for c, a in costs if c == 0]
    if zero_agents:
        sink = min(zero_agents)
        for a in group:
            pieces[idx[a]] = lift(piece) if a == sink else Piece.empty()
        return
    if len(group) == 1:
        pieces[idx[group[0]]] = lift(piece)
        return
    sub_g, smap = induced_cake(g, piece)
    new_vals = [restrict_and_renormalize(vals[a], smap) for a in group]
    new_idx = [idx[a] for a in group]
    _chore_rec(sub_g, new_vals, new_idx, _compose_lift(lift, smap), pieces, log)


def _chore_rec(
    g: CakeGraph,
    vals: list[Valuation],
    idx: list[int],
    lift: Lift,
    pieces: list[Piece],
    log: QueryLog,
) -> None:
    k = len(idx)
    if k == 1:
        pieces[idx[0]] = lift(g.whole_piece())
        return
    if k == 2:
        first_part, second_part = _fixed_pair(g, vals[0], vals[1], log)
        pieces[idx[0]] = lift(second_part)
        pieces[idx[1]] = lift(first_part)
        return

    thresholds = _cond1_thresholds(k)
    tree, _ = split_cycles_to_tree(g)
    rt = _RootedTree(tree, min(tree.vertices))
    stv = {a: rt.subtree_values(vals[a]) for a in range(k)}
    log.eval_count += tree.m * k

    def subtree_violates(vertex: str) -> bool:
        costs = sorted(stv[a][vertex] for a in range(k))
        return not _cond1_holds(costs, k)

    v = rt.root
    assert subtree_violates(v), "the whole chore always violates condition one"
    while True:
        nxt = next((c for _, c in rt.children[v] if subtree_violates(c)), None)
        if nxt is None:
            break
        v = nxt

    violating_branch = None
    for edge, child in rt.children[v]:
        branch_costs = sorted(
            stv[a][child] + vals[a].edge_value(edge.id) for a in range(k)
        )
        if not _cond1_holds(branch_costs, k):
            violating_branch = (edge, child)
            break

    if violating_branch is not None:
        # Case 1: sweep along the branch edge to the last point where the
        # first condition still holds; there some inequality is exactly tight.
        edge, w = violating_branch
        leg = Leg(edge.id, edge.endpoint_position(w), edge.endpoint_position(v))
        leg_length = abs(leg.end - leg.start)
        direction = 1 if leg.end >= leg.start else -1
        BEFORE = Fraction(-1)
        offsets: list[list[Fraction]] = []  # offsets[i][a] for condition index i+1
        for i in range(k):
            row = []
            for a in range(k):
                budget = thresholds[i] - stv[a][w]
                pos = latest_position_within(vals[a], leg, budget)
                row.append(BEFORE if pos is None else abs(pos - leg.start))
            log.cut_count += k
            offsets.append(row)
        stop = min(sorted(row, reverse=True)[i] for i, row in enumerate(offsets))
        if not (ZERO <= stop < leg_length):
            raise ProtocolInvariantError("condition-one tightness point out of range")
        cut_pos = leg.start + direction * stop
        lo, hi = min(leg.start, cut_pos), max(leg.start, cut_pos)
        piece = rt.subtree_piece(w).union(Piece.of([Interval(edge.id, lo, hi)]))
        ranked = _sorted_costs(vals, piece, log)
        if not _cond1_holds([c for c, _ in ranked], k):
            raise ProtocolInvariantError("condition one broken at the computed stop")
        tight = [
            i
            for i in range(1, k + 1)
            if ranked[i - 1][0] == thresholds[i - 1]
        ]
        if not tight:
            raise ProtocolInvariantError("no condition-one inequality is tight at the stop")
        i_star = tight[0]
        group_a_size = max(1, i_star - 1)
    else:
        # Case 2: accumulate branches until condition one first fails.
        acc = Piece.empty()
        piece = None
        for edge, child in rt.children[v]:
            acc = acc.union(rt.branch_piece(edge, child))
            costs = sorted(value_of_piece(vals[a], acc, log) for a in range(k))
            if not _cond1_holds(costs, k):
                piece = acc
                break
        if piece is None:
            raise ProtocolInvariantError("branch accumulation never violated condition one")
        ranked = _sorted_costs(vals, piece, log)
        plain = [c for c, _ in ranked]
        if _cond2_holds(plain, k):
            raise ProtocolInvariantError("accumulated piece unexpectedly meets condition two")
        fail1 = next(
            i for i in range(1, k + 1) if plain[i - 1] > thresholds[i - 1]
        )
        if fail1 >= 2:
            group_a_size = fail1 - 1
        else:
            fail2 = next(
                (
                    j
                    for j in range(1, k)
                    if plain[j - 1] <= Fraction(j + 1, k + 1)
                ),
                None,
            )
            if fail2 is None:
                raise ProtocolInvariantError("condition two fails only at the last index")
            group_a_size = fail2

    group_a = [a for _, a in ranked[:group_a_size]]
    group_b = [a for _, a in ranked[group_a_size:]]
    rest = g.whole_piece().difference(piece)
    _divide_group(g, vals, piece, sorted(group_a), idx, lift, pieces, log)
    _divide_group(g, vals, rest, sorted(group_b), idx, lift, pieces, log)


def chore_upto5(inst: Instance) -> ProtocolResult:
    """Chore division for up to five agents with egalitarian cost at most 2/(n+1).

    For three to five agents: walk down the tree to a minimal subtree violating
    the cost condition, cut at the earliest tightness point (or accumulate
    branches), and split the agents into two groups that recurse on the two
    sides with per-agent renormalization.
    """
    _require(inst, mode="chore")
    if inst.n > 5:
        raise TooManyAgents(
            "the 2/(n+1) guarantee is only established for up to five agents"
        )
    if inst.n < 1:
        raise DomainError("need at least one agent")
    log = QueryLog()
    pieces: list[Piece] = [Piece.empty()] * inst.n
    _chore_rec(
        inst.graph, list(inst.agents), list(range(inst.n)), _identity_lift, pieces, log
    )
    return ProtocolResult(Allocation(tuple(pieces)), log)


# ---------------------------------------------------------------------------
# Name registry (used by the CLI)
# ---------------------------------------------------------------------------

PROTOCOL_NAMES = (
    "egal",
    "star",
    "prop2",
    "best2",
    "fixed2",
    "flex2",
    "multi2",
    "height2",
    "equit2",
    "chore2",
    "chore3",
    "chore5",
)


def _auto_height2_root(inst: Instance) -> str:
    g = inst.graph
    if g.is_tree():
        for root in g.vertices:
            if all(d <= 2 for d in _RootedTree(g, root).depth_map().values()):
                return root
    raise NotHeightTwoTree("no root gives this graph height at most two")


def run_protocol(name: str, inst: Instance, params: Optional[dict] = None):
    """Run a protocol by its stable name; returns a ProtocolResult or
    EntitlementResult.  ``params`` supplies protocol-specific arguments
    (``alpha`` for flex2, ``k`` for multi2, optional ``root`` for height2)."""
    params = params or {}
    if name == "egal":
        return connected_egalitarian(inst)
    if name == "star":
        return star_egalitarian(inst)
    if name == "prop2":
        lab = compute_contiguous_labeling(inst.graph)
        return proportional_two_connected(inst, lab)
    if name == "best2":
        return two_agent_best(inst)
    if name == "fixed2":
        return two_agent_fixed(inst)
    if name == "flex2":
        if "alpha" not in params:
            raise DomainError("flex2 needs an alpha parameter")
        return two_agent_flexible(inst, Fraction(params["alpha"]))
    if name == "multi2":
        if "k" not in params:
            raise DomainError("multi2 needs a piece budget parameter k")
        return multi_piece_two(inst, int(params["k"]))
    if name == "height2":
        root = params.get("root") or _auto_height2_root(inst)
        return height2_two_piece_proportional(inst, root)
    if name == "equit2":
        return equitable_two(inst)
    if name == "chore2":
        return chore_two(inst)
    if name == "chore3":
        return chore_three(inst)
    if name == "chore5":
        return chore_upto5(inst)
    raise DomainError(f"unknown protocol {name!r}")


def guarantee_violations(
    name: str,
    inst: Instance,
    report: VerificationReport,
    params: Optional[dict] = None,
    result=None,
) -> list[str]:
    """Check a verification report against the protocol's stated guarantee.

    Returns a list of human-readable violations (empty when the guarantee holds).
    """
    params = params or {}
    problems: list[str] = []
    if not report.disjoint:
        problems.append("pieces overlap")
    if not report.complete:
        problems.append("allocation is not complete")

    def need(cond: bool, message: str) -> None:
        if not cond:
            problems.append(message)

    values = report.values
    n = inst.n
    if name == "egal":
        need(report.all_connected, "some piece is disconnected")
        need(
            report.egalitarian >= Fraction(1, 2 * n - 1),
            f"welfare {report.egalitarian} below 1/{2 * n - 1}",
        )
    elif name == "star":
        need(report.all_connected, "some piece is disconnected")
        bound = f_guarantee(n, inst.graph.m)
        need(report.egalitarian >= bound, f"welfare {report.egalitarian} below {bound}")
    elif name in ("prop2",):
        need(report.all_connected, "some piece is disconnected")
        need(min(values) >= HALF, "welfare below 1/2")
    elif name == "best2":
        need(report.all_connected, "some piece is disconnected")
        witness = classify_almost_bridgeless(inst.graph)
        bound = HALF if witness.is_almost_bridgeless else THIRD
        need(min(values) >= bound, f"welfare below {bound}")
        need(values[0] >= HALF, "agent 1 below 1/2")
    elif name == "fixed2":
        need(report.all_connected, "some piece is disconnected")
        need(values[0] >= HALF, "agent 1 below 1/2")
        need(values[1] >= THIRD, "agent 2 below 1/3")
    elif name == "flex2":
        need(report.all_connected, "some piece is disconnected")
        alpha = Fraction(params["alpha"])
        assert result is not None
        need(values[result.alpha_agent] >= alpha, "alpha guarantee failed")
        need(values[result.beta_agent] >= 1 - 2 * alpha, "1-2*alpha guarantee failed")
    elif name == "multi2":
        k = int(params["k"])
        bound = HALF - Fraction(1, 2 * 3**k)
        need(min(values) >= bound, f"welfare below {bound}")
        need(report.total_pieces <= k + 1, f"more than {k + 1} pieces in total")
    elif name == "height2":
        need(min(values) >= HALF, "welfare below 1/2")
        need(
            all(a.piece_count <= 2 for a in report.agents),
            "an agent received more than two pieces",
        )
    elif name == "equit2":
        need(report.all_connected, "some piece is disconnected")
        need(report.inequity <= THIRD, f"inequity {report.inequity} above 1/3")
    elif name == "chore2":
        need(report.all_connected, "some piece is disconnected")
        need(values[0] <= HALF, "agent 1 above 1/2")
        need(values[1] <= Fraction(2, 3), "agent 2 above 2/3")
    elif name == "chore3":
        need(report.all_connected, "some piece is disconnected")
        need(report.egalitarian <= HALF, "egalitarian cost above 1/2")
    elif name == "chore5":
        need(report.all_connected, "some piece is disconnected")
        bound = Fraction(2, n + 1)
        need(report.egalitarian <= bound, f"egalitarian cost above {bound}")
    else:
        raise DomainError(f"unknown protocol {name!r}")
    return problems
