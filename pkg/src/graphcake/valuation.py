"""Agent preferences: exact piecewise-constant densities, evaluation and cut queries.

Valuations double as cost functions in chore mode.  Protocols interact with
them only through evaluation and cut queries, which keeps the interface
measure-agnostic; the piecewise-constant representation is closed under every
cut the protocols perform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InsufficientValue, UnknownEdge, ZeroValuePiece
from .graph_core import (
    ONE,
    ZERO,
    CakeGraph,
    Interval,
    Piece,
    Point,
    SubcakeMap,
    canonical_point,
    format_fraction,
    parse_fraction,
)


@dataclass(frozen=True)
class Segment:
    """Constant density over [lo, hi)."""

    lo: Fraction
    hi: Fraction
    density: Fraction


EdgeDensity = tuple[Segment, ...]


def _normalize_segments(segments: Iterable[tuple]) -> EdgeDensity:
    segs = [Segment(Fraction(a), Fraction(b), Fraction(d)) for a, b, d in segments]
    if not segs or segs[0].lo != ZERO or segs[-1].hi != ONE:
        raise ValueError("segments must partition [0, 1]")
    for prev, cur in zip(segs, segs[1:]):
        if prev.hi != cur.lo:
            raise ValueError("segments must be contiguous")
    for s in segs:
        if s.lo >= s.hi:
            raise ValueError("segment breakpoints must be strictly increasing")
        if s.density < 0:
            raise ValueError("densities must be nonnegative")
    return tuple(segs)


class Valuation:
    """Map from edge id to a piecewise-constant rational density.

    Edges absent from the map carry zero density.  A normalized valuation
    integrates to exactly 1 over the whole cake.
    """

    __slots__ = ("densities",)

    def __init__(self, densities: Mapping[str, EdgeDensity]):
        self.densities = dict(densities)

    @staticmethod
    def from_segments(per_edge: Mapping[str, Sequence[tuple]]) -> "Valuation":
        return Valuation({e: _normalize_segments(s) for e, s in per_edge.items()})

    @staticmethod
    def from_edge_values(values: Mapping[str, Fraction | int]) -> "Valuation":
        """Uniform density within each edge, integrating to the given edge values."""
        return Valuation(
            {
                e: (Segment(ZERO, ONE, Fraction(val)),)
                for e, val in values.items()
                if Fraction(val) != 0
            }
        )

    @staticmethod
    def uniform(g: CakeGraph) -> "Valuation":
        share = Fraction(1, g.m)
        return Valuation.from_edge_values({e.id: share for e in g.edges})

    def edge_segments(self, edge_id: str) -> EdgeDensity:
        return self.densities.get(edge_id, (Segment(ZERO, ONE, ZERO),))

    def edge_value(self, edge_id: str) -> Fraction:
        return sum(
            (s.density * (s.hi - s.lo) for s in self.edge_segments(edge_id)), ZERO
        )

    def total(self) -> Fraction:
        return sum((self.edge_value(e) for e in self.densities), ZERO)

    def is_normalized(self) -> bool:
        return self.total() == 1

    def interval_value(self, edge_id: str, lo: Fraction, hi: Fraction) -> Fraction:
        acc = ZERO
        for s in self.edge_segments(edge_id):
            a, b = max(s.lo, lo), min(s.hi, hi)
            if a < b:
                acc += s.density * (b - a)
        return acc

    def scaled(self, factor: Fraction) -> "Valuation":
        return Valuation(
            {
                e: tuple(Segment(s.lo, s.hi, s.density * factor) for s in segs)
                for e, segs in self.densities.items()
            }
        )

    def to_json(self) -> dict:
        out = {}
        for e, segs in sorted(self.densities.items()):
            out[e] = [[format_fraction(s.lo), format_fraction(s.density)] for s in segs]
        return out

    @staticmethod
    def from_json(data: Mapping) -> "Valuation":
        densities = {}
        for e, pairs in data.items():
            los = [parse_fraction(lo) for lo, _ in pairs]
            ds = [parse_fraction(d) for _, d in pairs]
            if not los or los[0] != ZERO:
                raise ValueError(f"edge {e!r}: segment list must start at 0")
            his = los[1:] + [ONE]
            densities[e] = _normalize_segments(zip(los, his, ds))
        return Valuation(densities)


def combine_valuations(vals: Sequence[Valuation], weights: Sequence[Fraction]) -> Valuation:
    """Weighted sum of valuations, merging density breakpoints exactly."""
    edges = sorted({e for v in vals for e in v.densities})
    densities: dict[str, EdgeDensity] = {}
    for e in edges:
        cuts = sorted({ZERO, ONE, *(s.lo for v in vals for s in v.edge_segments(e)),
                       *(s.hi for v in vals for s in v.edge_segments(e))})
        segs = []
        for lo, hi in zip(cuts, cuts[1:]):
            mid_value = sum(
                (w * v.interval_value(e, lo, hi) for v, w in zip(vals, weights)), ZERO
            )
            segs.append(Segment(lo, hi, mid_value / (hi - lo)))
        densities[e] = tuple(segs)
    return Valuation(densities)


@dataclass(frozen=True)
class Instance:
    """A cake or chore division problem: graph, one valuation per agent, mode."""

    graph: CakeGraph
    agents: tuple[Valuation, ...]
    mode: str = "cake"

    def __post_init__(self):
        if self.mode not in ("cake", "chore"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for i, v in enumerate(self.agents):
            for e in v.densities:
                if not self.graph.has_edge(e):
                    raise UnknownEdge(f"agent {i} values unknown edge {e!r}")
            if not v.is_normalized():
                raise ValueError(f"agent {i} valuation integrates to {v.total()}, not 1")

    @property
    def n(self) -> int:
        return len(self.agents)

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "mode": self.mode,
            "agents": [v.to_json() for v in self.agents],
        }

    @staticmethod
    def from_json(data: Mapping) -> "Instance":
        return Instance(
            CakeGraph.from_json(data["graph"]),
            tuple(Valuation.from_json(a) for a in data["agents"]),
            data.get("mode", "cake"),
        )


# ---------------------------------------------------------------------------
# Evaluation and cut queries
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Leg:
    """One directed sweep along an edge; ``start`` may exceed ``end``."""

    edge: str
    start: Fraction
    end: Fraction


Trajectory = tuple[Leg, ...]


@dataclass
class QueryLog:
    """Counts of evaluation and cut queries issued during a protocol run."""

    eval_count: int = 0
    cut_count: int = 0

    def merge(self, other: "QueryLog") -> None:
        self.eval_count += other.eval_count
        self.cut_count += other.cut_count

    def to_json(self) -> dict:
        return {"eval": self.eval_count, "cut": self.cut_count}


def value_of_piece(v: Valuation, p: Piece, log: Optional[QueryLog] = None) -> Fraction:
    """Exact integral of the density over the piece (one evaluation query)."""
    if log is not None:
        log.eval_count += 1
    return sum((v.interval_value(iv.edge, iv.lo, iv.hi) for iv in p.intervals), ZERO)


def _leg_segments(v: Valuation, leg: Leg) -> list[tuple[Fraction, Fraction]]:
    """Constant-density stretches of a leg as (sweep length, density), in sweep order."""
    segs = v.edge_segments(leg.edge)
    lo, hi = min(leg.start, leg.end), max(leg.start, leg.end)
    clipped = []
    for s in segs:
        a, b = max(s.lo, lo), min(s.hi, hi)
        if a < b:
            clipped.append((a, b, s.density))
    if leg.start > leg.end:
        clipped = [(a, b, d) for a, b, d in reversed(clipped)]
    return [(b - a, d) for a, b, d in clipped]


def trajectory_value(v: Valuation, t: Trajectory) -> Fraction:
    return sum(
        (v.interval_value(leg.edge, min(leg.start, leg.end), max(leg.start, leg.end)) for leg in t),
        ZERO,
    )


@dataclass(frozen=True)
class TrajectoryCut:
    """A cut point expressed both as a trajectory offset and a cake point."""

    leg_index: int
    position: Fraction  # parametric position on the leg's edge
    sweep_offset: Fraction  # total length swept before the cut
    point: Point


def cut_trajectory(
    g: CakeGraph, v: Valuation, t: Trajectory, target: Fraction, log: Optional[QueryLog] = None
) -> TrajectoryCut:
    """Earliest point along the trajectory whose prefix has exactly the target value.

    Zero-density plateaus resolve to their first point.  Raises
    InsufficientValue when the whole trajectory is worth less than the target.
    """
    if log is not None:
        log.cut_count += 1
    if target < 0:
        raise InsufficientValue(f"negative cut target {target}")
    acc = ZERO
    offset = ZERO
    for i, leg in enumerate(t):
        direction = 1 if leg.end >= leg.start else -1
        pos = leg.start
        for length, density in _leg_segments(v, leg):
            if acc == target:
                return TrajectoryCut(i, pos, offset, canonical_point(g, leg.edge, pos))
            seg_value = density * length
            if density > 0 and acc + seg_value >= target:
                dist = (target - acc) / density
                cut_pos = pos + direction * dist
                return TrajectoryCut(
                    i, cut_pos, offset + dist, canonical_point(g, leg.edge, cut_pos)
                )
            acc += seg_value
            pos += direction * length
            offset += length
        if acc == target:
            return TrajectoryCut(i, pos, offset, canonical_point(g, leg.edge, pos))
    raise InsufficientValue(f"trajectory is worth {acc}, less than the target {target}")


def cut_query(
    g: CakeGraph, v: Valuation, t: Trajectory, target: Fraction, log: Optional[QueryLog] = None
) -> Point:
    return cut_trajectory(g, v, t, target, log).point


def trajectory_prefix_piece(t: Trajectory, cut: TrajectoryCut) -> Piece:
    """The piece covered by the knife up to the given cut."""
    intervals = []
    for leg in t[: cut.leg_index]:
        intervals.append(
            Interval(leg.edge, min(leg.start, leg.end), max(leg.start, leg.end))
        )
    leg = t[cut.leg_index]
    lo, hi = min(leg.start, cut.position), max(leg.start, cut.position)
    intervals.append(Interval(leg.edge, lo, hi))
    return Piece.of(intervals)


def latest_position_within(
    v: Valuation, leg: Leg, budget: Fraction
) -> Optional[Fraction]:
    """Latest parametric position on the leg whose prefix value stays <= budget.

    Returns None for a negative budget, the leg end when the whole leg fits,
    and otherwise the far end of the plateau where the prefix equals the budget.
    """
    if budget < 0:
        return None
    direction = 1 if leg.end >= leg.start else -1
    pos = leg.start
    acc = ZERO
    for length, density in _leg_segments(v, leg):
        seg_value = density * length
        if acc + seg_value > budget:
            if density == 0:  # pragma: no cover - zero density adds no value
                raise AssertionError
            dist = (budget - acc) / density
            return pos + direction * dist
        acc += seg_value
        pos += direction * length
    return leg.end


# ---------------------------------------------------------------------------
# Restriction to subcakes
# ---------------------------------------------------------------------------


def restrict(v: Valuation, cmap: SubcakeMap) -> Valuation:
    """Transport a valuation onto an induced subcake, preserving measure."""
    densities: dict[str, EdgeDensity] = {}
    for new_edge, span in cmap.spans.items():
        width = span.hi - span.lo
        segs = []
        for s in v.edge_segments(span.edge):
            a, b = max(s.lo, span.lo), min(s.hi, span.hi)
            if a < b:
                segs.append(Segment((a - span.lo) / width, (b - span.lo) / width, s.density * width))
        if not segs:
            segs = [Segment(ZERO, ONE, ZERO)]
        # fill gaps left by clipping (zero-density outside the old segments)
        full: list[Segment] = []
        cursor = ZERO
        for s in segs:
            if s.lo > cursor:
                full.append(Segment(cursor, s.lo, ZERO))
            full.append(s)
            cursor = s.hi
        if cursor < ONE:
            full.append(Segment(cursor, ONE, ZERO))
        densities[new_edge] = tuple(full)
    return Valuation(densities)


def restrict_and_renormalize(v: Valuation, cmap: SubcakeMap) -> Valuation:
    """Restriction scaled so the subcake is worth exactly 1.

    Raises ZeroValuePiece when the agent values the subcake at zero; callers
    must special-case such agents.
    """
    r = restrict(v, cmap)
    total = r.total()
    if total == 0:
        raise ZeroValuePiece("agent values the subcake at zero")
    return r.scaled(Fraction(1) / total)
