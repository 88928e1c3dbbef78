"""Topology of the cake: multigraph, points, pieces, bridge analysis and graph surgeries.

All positions are exact `fractions.Fraction` values; nothing in this module
touches floating point.  Every edge carries an implicit parametrization of
[0, 1] with position 0 at its first endpoint.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .errors import (
    BudgetExceeded,
    DisconnectedPiece,
    GraphConstructionError,
    MalformedPiece,
    NotAlmostBridgeless,
)

ZERO = Fraction(0)
ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str

    def other(self, vertex: str) -> str:
        if vertex == self.u:
            return self.v
        if vertex == self.v:
            return self.u
        raise ValueError(f"vertex {vertex!r} is not an endpoint of edge {self.id!r}")

    def endpoint_position(self, vertex: str) -> Fraction:
        """Parametric position (0 or 1) of the given endpoint."""
        if vertex == self.u:
            return ZERO
        if vertex == self.v:
            return ONE
        raise ValueError(f"vertex {vertex!r} is not an endpoint of edge {self.id!r}")


class CakeGraph:
    """A connected loopless multigraph whose edges are unit intervals of cake.

    Vertices and edges keep their construction order; every deterministic
    tie-break in the library uses that order.
    """

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str, str]]):
        self.vertices: tuple[str, ...] = tuple(vertices)
        self.edges: tuple[Edge, ...] = tuple(Edge(*e) for e in edges)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphConstructionError("duplicate vertex ids")
        if len({e.id for e in self.edges}) != len(self.edges):
            raise GraphConstructionError("duplicate edge ids")
        if not self.edges:
            raise GraphConstructionError("a cake graph needs at least one edge")
        vs = set(self.vertices)
        for e in self.edges:
            if e.u == e.v:
                raise GraphConstructionError(f"loop at vertex {e.u!r} (edge {e.id!r})")
            if e.u not in vs or e.v not in vs:
                raise GraphConstructionError(f"edge {e.id!r} references unknown vertex")
        self._by_id: dict[str, Edge] = {e.id: e for e in self.edges}
        adj: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.u].append(e)
            adj[e.v].append(e)
        self._adj = adj
        if not self._is_connected():
            raise GraphConstructionError("graph is not connected")

    # -- basic accessors ----------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._by_id[edge_id]
        except KeyError:
            raise MalformedPiece(f"unknown edge {edge_id!r}") from None

    def has_edge(self, edge_id: str) -> bool:
        return edge_id in self._by_id

    def incident(self, vertex: str) -> tuple[Edge, ...]:
        return tuple(self._adj[vertex])

    def degree(self, vertex: str) -> int:
        return len(self._adj[vertex])

    def neighbors(self, vertex: str) -> tuple[str, ...]:
        seen: list[str] = []
        for e in self._adj[vertex]:
            w = e.other(vertex)
            if w not in seen:
                seen.append(w)
        return tuple(seen)

    def _is_connected(self) -> bool:
        if not self.vertices:
            return False
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for e in self._adj[v]:
                w = e.other(v)
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self.vertices)

    def whole_piece(self) -> "Piece":
        return Piece.of(Interval(e.id, ZERO, ONE) for e in self.edges)

    def star_center(self) -> Optional[str]:
        """The center vertex if this graph is a star (a tree whose edges share one vertex)."""
        if self.m != len(self.vertices) - 1:
            return None
        for c in self.vertices:
            if self.degree(c) == self.m and self.m >= 2:
                return c
        return None

    def is_tree(self) -> bool:
        return self.m == len(self.vertices) - 1

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[e.id, e.u, e.v] for e in self.edges],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CakeGraph":
        return cls(data["vertices"], [tuple(e) for e in data["edges"]])

    def to_dot(self, dashed_edges: Iterable[str] = ()) -> str:
        dashed = set(dashed_edges)
        lines = ["graph cake {"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for e in self.edges:
            style = ', style=dashed' if e.id in dashed else ""
            lines.append(f'  "{e.u}" -- "{e.v}" [label="{e.id}"{style}];')
        lines.append("}")
        return "\n".join(lines)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"CakeGraph({len(self.vertices)} vertices, {self.m} edges)"


# ---------------------------------------------------------------------------
# Points, intervals, pieces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexPoint:
    vertex: str


@dataclass(frozen=True)
class EdgePoint:
    edge: str
    pos: Fraction


Point = Union[VertexPoint, EdgePoint]


def canonical_point(g: CakeGraph, edge_id: str, pos: Fraction) -> Point:
    """Canonical form: positions 0 and 1 collapse to the corresponding vertex."""
    e = g.edge(edge_id)
    if pos == ZERO:
        return VertexPoint(e.u)
    if pos == ONE:
        return VertexPoint(e.v)
    if not ZERO < pos < ONE:
        raise MalformedPiece(f"position {pos} outside [0, 1] on edge {edge_id!r}")
    return EdgePoint(edge_id, pos)


@dataclass(frozen=True, order=True)
class Interval:
    edge: str
    lo: Fraction
    hi: Fraction

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo


class Piece:
    """A finite union of closed subintervals of edges, kept in canonical form.

    Canonical form: per edge, intervals are sorted, interior-disjoint,
    touching intervals merged, and zero-length intervals dropped.
    """

    __slots__ = ("intervals",)

    def __init__(self, intervals: tuple[Interval, ...]):
        self.intervals = intervals

    @staticmethod
    def of(intervals: Iterable[Interval | tuple]) -> "Piece":
        by_edge: dict[str, list[tuple[Fraction, Fraction]]] = defaultdict(list)
        edge_order: list[str] = []
        for item in intervals:
            iv = item if isinstance(item, Interval) else Interval(item[0], Fraction(item[1]), Fraction(item[2]))
            if not (ZERO <= iv.lo <= iv.hi <= ONE):
                raise MalformedPiece(f"interval [{iv.lo}, {iv.hi}] outside [0, 1] on edge {iv.edge!r}")
            if iv.lo == iv.hi:
                continue
            if iv.edge not in by_edge:
                edge_order.append(iv.edge)
            by_edge[iv.edge].append((iv.lo, iv.hi))
        out: list[Interval] = []
        for edge in sorted(edge_order):
            spans = sorted(by_edge[edge])
            merged: list[list[Fraction]] = []
            for lo, hi in spans:
                if merged and lo <= merged[-1][1]:
                    merged[-1][1] = max(merged[-1][1], hi)
                else:
                    merged.append([lo, hi])
            out.extend(Interval(edge, lo, hi) for lo, hi in merged)
        return Piece(tuple(out))

    @staticmethod
    def empty() -> "Piece":
        return Piece(())

    def is_empty(self) -> bool:
        return not self.intervals

    def by_edge(self) -> dict[str, list[Interval]]:
        out: dict[str, list[Interval]] = defaultdict(list)
        for iv in self.intervals:
            out[iv.edge].append(iv)
        return out

    def measure(self) -> Fraction:
        return sum((iv.length for iv in self.intervals), ZERO)

    def union(self, other: "Piece") -> "Piece":
        return Piece.of(self.intervals + other.intervals)

    def difference(self, other: "Piece") -> "Piece":
        """Set difference up to finitely many points (closed-interval convention)."""
        theirs = other.by_edge()
        out: list[Interval] = []
        for iv in self.intervals:
            chunks = [(iv.lo, iv.hi)]
            for cut in theirs.get(iv.edge, ()):
                nxt: list[tuple[Fraction, Fraction]] = []
                for lo, hi in chunks:
                    if cut.hi <= lo or cut.lo >= hi:
                        nxt.append((lo, hi))
                        continue
                    if cut.lo > lo:
                        nxt.append((lo, cut.lo))
                    if cut.hi < hi:
                        nxt.append((cut.hi, hi))
                chunks = nxt
            out.extend(Interval(iv.edge, lo, hi) for lo, hi in chunks)
        return Piece.of(out)

    def to_json(self) -> list:
        return [[iv.edge, _fmt(iv.lo), _fmt(iv.hi)] for iv in self.intervals]

    @staticmethod
    def from_json(data: Iterable) -> "Piece":
        return Piece.of((e, parse_fraction(lo), parse_fraction(hi)) for e, lo, hi in data)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Piece) and self.intervals == other.intervals

    def __hash__(self) -> int:
        return hash(self.intervals)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        parts = ", ".join(f"{iv.edge}[{iv.lo},{iv.hi}]" for iv in self.intervals)
        return f"Piece({parts})"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fraction(text: str | int) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    text = text.strip()
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    return Fraction(int(text))


format_fraction = _fmt


# ---------------------------------------------------------------------------
# Piece connectivity
# ---------------------------------------------------------------------------


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def component_count(self, n: int) -> int:
        return len({self.find(i) for i in range(n)})


def _interval_components(g: CakeGraph, p: Piece) -> int:
    """Number of connected components of a canonical piece (0 for the empty piece)."""
    ivs = p.intervals
    if not ivs:
        return 0
    uf = _UnionFind(len(ivs))
    touching: dict[str, list[int]] = defaultdict(list)
    for i, iv in enumerate(ivs):
        e = g.edge(iv.edge)
        if iv.lo == ZERO:
            touching[e.u].append(i)
        if iv.hi == ONE:
            touching[e.v].append(i)
    for idxs in touching.values():
        for other in idxs[1:]:
            uf.union(idxs[0], other)
    return uf.component_count(len(ivs))


def piece_is_connected(g: CakeGraph, p: Piece) -> bool:
    """True iff any two points of the piece are joined by a path inside it.

    After canonicalization, intervals can only meet at graph vertices, so
    connectivity reduces to the interval/vertex incidence structure.  The
    empty piece counts as connected.
    """
    return _interval_components(g, p) <= 1


def piece_component_count(g: CakeGraph, p: Piece) -> int:
    return _interval_components(g, p)


# ---------------------------------------------------------------------------
# Bridges and the almost-bridgeless classification
# ---------------------------------------------------------------------------


def find_bridges(g: CakeGraph) -> set[str]:
    """Edge ids of all bridges (edges on no cycle).  Parallel edges are never bridges."""
    index = {v: i for i, v in enumerate(g.vertices)}
    disc = [0] * len(g.vertices)
    low = [0] * len(g.vertices)
    visited = [False] * len(g.vertices)
    bridges: set[str] = set()
    counter = 1
    root = index[g.vertices[0]]
    # iterative DFS; entries are (vertex, incoming edge id, iterator over incident edges)
    stack: list[tuple[int, Optional[str], Iterator[Edge]]] = []
    visited[root] = True
    disc[root] = low[root] = counter
    counter += 1
    stack.append((root, None, iter(g.incident(g.vertices[0]))))
    while stack:
        v_i, in_edge, it = stack[-1]
        advanced = False
        for e in it:
            w_i = index[e.other(g.vertices[v_i])]
            if e.id == in_edge:
                # the tree edge we entered through; a parallel copy has a different id
                continue
            if visited[w_i]:
                low[v_i] = min(low[v_i], disc[w_i])
            else:
                visited[w_i] = True
                disc[w_i] = low[w_i] = counter
                counter += 1
                stack.append((w_i, e.id, iter(g.incident(g.vertices[w_i]))))
                advanced = True
                break
        if not advanced:
            stack.pop()
            if stack:
                p_i = stack[-1][0]
                low[p_i] = min(low[p_i], low[v_i])
                if low[v_i] > disc[p_i]:
                    bridges.add(in_edge)  # type: ignore[arg-type]
    return bridges


@dataclass(frozen=True)
class AlmostBridgelessWitness:
    """Either an edge (x, y) whose addition kills all bridges, or three bridges
    that no single path can cover."""

    is_almost_bridgeless: bool
    endpoints: Optional[tuple[str, str]] = None
    obstruction: Optional[tuple[str, str, str]] = None


def _two_edge_connected_components(g: CakeGraph, bridges: set[str]) -> dict[str, int]:
    """Map each vertex to the index of its 2-edge-connected component."""
    comp: dict[str, int] = {}
    next_id = 0
    for v in g.vertices:
        if v in comp:
            continue
        comp[v] = next_id
        queue = deque([v])
        while queue:
            a = queue.popleft()
            for e in g.incident(a):
                if e.id in bridges:
                    continue
                b = e.other(a)
                if b not in comp:
                    comp[b] = next_id
                    queue.append(b)
        next_id += 1
    return comp


def classify_almost_bridgeless(g: CakeGraph) -> AlmostBridgelessWitness:
    """Decide whether one added edge can make the graph bridgeless.

    Contract the 2-edge-connected components into the bridge tree.  The graph
    is almost bridgeless iff that tree is a path; the witness endpoints are
    the first vertices of its two extreme components.  Otherwise a component
    of bridge-degree >= 3 supplies three bridges no path can cover.
    """
    bridges = find_bridges(g)
    if not bridges:
        e = g.edges[0]
        return AlmostBridgelessWitness(True, endpoints=(e.u, e.v))
    comp = _two_edge_connected_components(g, bridges)
    incident_bridges: dict[int, list[str]] = defaultdict(list)
    for e in g.edges:
        if e.id in bridges:
            incident_bridges[comp[e.u]].append(e.id)
            incident_bridges[comp[e.v]].append(e.id)
    for c in sorted(incident_bridges):
        if len(incident_bridges[c]) >= 3:
            e1, e2, e3 = incident_bridges[c][:3]
            return AlmostBridgelessWitness(False, obstruction=(e1, e2, e3))
    # all bridge-tree degrees <= 2, so the bridge tree is a path
    extremes = sorted(c for c, bs in incident_bridges.items() if len(bs) == 1)
    first = next(v for v in g.vertices if comp[v] == extremes[0])
    second = next(v for v in g.vertices if comp[v] == extremes[1])
    return AlmostBridgelessWitness(True, endpoints=(first, second))


# ---------------------------------------------------------------------------
# Oriented labelings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrientedLabeling:
    """Edges in label order 1..m; ``tails[e]`` is the vertex the knife enters from."""

    order: tuple[str, ...]
    tails: Mapping[str, str]

    def head(self, g: CakeGraph, edge_id: str) -> str:
        return g.edge(edge_id).other(self.tails[edge_id])

    def to_json(self, g: CakeGraph) -> list:
        return [[e, self.tails[e], self.head(g, e)] for e in self.order]


def is_contiguous(g: CakeGraph, lab: OrientedLabeling) -> bool:
    """Check both halves of the contiguity predicate for every label."""
    m = g.m
    if sorted(lab.order) != sorted(e.id for e in g.edges):
        return False
    for e_id in lab.order:
        e = g.edge(e_id)
        if lab.tails[e_id] not in (e.u, e.v):
            return False

    def block_ok(edge_ids: Sequence[str], anchor: str) -> bool:
        if not edge_ids:
            return True
        verts: dict[str, int] = {}
        for e_id in edge_ids:
            e = g.edge(e_id)
            for v in (e.u, e.v):
                if v not in verts:
                    verts[v] = len(verts)
        uf = _UnionFind(len(verts))
        for e_id in edge_ids:
            e = g.edge(e_id)
            uf.union(verts[e.u], verts[e.v])
        if uf.component_count(len(verts)) != 1:
            return False
        return anchor in verts

    for i in range(2, m + 1):
        if not block_ok(lab.order[: i - 1], lab.tails[lab.order[i - 1]]):
            return False
    for i in range(1, m):
        if not block_ok(lab.order[i:], lab.head(g, lab.order[i - 1])):
            return False
    return True


def _search_path(
    g: CakeGraph,
    start: str,
    goal: Optional[str],
    stop_at: Optional[set[str]] = None,
    banned_edge: Optional[str] = None,
    interior: Optional[set[str]] = None,
) -> list[Edge]:
    """BFS path (as a list of edges) from ``start`` to ``goal`` or to any vertex
    in ``stop_at``; intermediate vertices are restricted to ``interior`` when given.
    Neighbor expansion follows edge order, so the result is deterministic."""
    parent: dict[str, tuple[str, Edge]] = {}
    queue = deque([start])
    seen = {start}
    while queue:
        a = queue.popleft()
        for e in g.incident(a):
            if e.id == banned_edge:
                continue
            b = e.other(a)
            if b in seen:
                continue
            parent[b] = (a, e)
            if (goal is not None and b == goal) or (stop_at is not None and b in stop_at):
                path: list[Edge] = []
                cur = b
                while cur != start:
                    prev, edge = parent[cur]
                    path.append(edge)
                    cur = prev
                return list(reversed(path))
            if interior is None or b in interior:
                seen.add(b)
                queue.append(b)
    raise NotAlmostBridgeless("internal search failed; graph is not almost bridgeless")


def compute_contiguous_labeling(g: CakeGraph) -> OrientedLabeling:
    """Construct a contiguous oriented labeling by iterative ear insertion.

    Requires the graph to be almost bridgeless.  The first ear is a path
    between the witness endpoints; every later ear is inserted right after
    the first edge directed into its start vertex (or at the front when the
    start is the global source).
    """
    witness = classify_almost_bridgeless(g)
    if not witness.is_almost_bridgeless:
        raise NotAlmostBridgeless(
            f"no contiguous labeling exists; obstruction bridges {witness.obstruction}"
        )
    u, v = witness.endpoints  # type: ignore[misc]

    # order entries are (edge id, tail vertex, head vertex)
    order: list[tuple[str, str, str]] = []
    used_edges: set[str] = set()
    used_vertices: set[str] = set()

    def first_into(x: str) -> Optional[int]:
        for i, (_, _, head) in enumerate(order):
            if head == x:
                return i
        return None

    def insert_ear(ear: list[tuple[str, str, str]]) -> None:
        x, z = ear[0][1], ear[-1][2]
        if x != u:
            fx = first_into(x)
            assert fx is not None, "every used vertex other than the source has an incoming edge"
            fz = first_into(z)
            if z == u or (fz is not None and fz < fx):
                ear = [(e, h, t) for (e, t, h) in reversed(ear)]
                x, z = ear[0][1], ear[-1][2]
        pos = 0 if x == u else first_into(x) + 1  # type: ignore[operator]
        order[pos:pos] = ear
        for e_id, tail, head in ear:
            used_edges.add(e_id)
            used_vertices.add(tail)
            used_vertices.add(head)

    first = _search_path(g, u, v)
    ear0: list[tuple[str, str, str]] = []
    cur = u
    for e in first:
        ear0.append((e.id, cur, e.other(cur)))
        cur = e.other(cur)
    order.extend(ear0)
    for e_id, tail, head in ear0:
        used_edges.add(e_id)
        used_vertices.add(tail)
        used_vertices.add(head)

    while len(used_edges) < g.m:
        chords = [
            e
            for e in g.edges
            if e.id not in used_edges and e.u in used_vertices and e.v in used_vertices
        ]
        for e in chords:
            insert_ear([(e.id, e.u, e.v)])
        if len(used_edges) == g.m:
            break
        frontier = next(
            e
            for e in g.edges
            if e.id not in used_edges and (e.u in used_vertices) != (e.v in used_vertices)
        )
        x = frontier.u if frontier.u in used_vertices else frontier.v
        y = frontier.other(x)
        unused = set(g.vertices) - used_vertices
        trail = _search_path(
            g, y, goal=None, stop_at=used_vertices, banned_edge=frontier.id, interior=unused
        )
        ear: list[tuple[str, str, str]] = [(frontier.id, x, y)]
        cur = y
        for e in trail:
            ear.append((e.id, cur, e.other(cur)))
            cur = e.other(cur)
        insert_ear(ear)

    lab = OrientedLabeling(tuple(e for e, _, _ in order), {e: t for e, t, _ in order})
    assert is_contiguous(g, lab), "ear construction produced a non-contiguous labeling"
    return lab


# ---------------------------------------------------------------------------
# Bipolar numberings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BipolarNumbering:
    labels: Mapping[str, int]


@dataclass(frozen=True)
class BipolarSearchResult:
    numbering: Optional[BipolarNumbering]
    exhaustive: bool

    @property
    def found(self) -> bool:
        return self.numbering is not None


def find_bipolar_numbering(g: CakeGraph, budget: int = 10) -> BipolarSearchResult:
    """Exhaustive search for a vertex numbering where every non-extreme vertex
    has both a smaller- and a larger-labeled neighbor.

    Raises BudgetExceeded when the vertex count exceeds ``budget``; a ``found``
    result or a ``None`` with ``exhaustive=True`` is otherwise definitive.
    """
    k = len(g.vertices)
    if k > budget:
        raise BudgetExceeded(f"{k} vertices exceeds the search budget of {budget}")
    nbrs = {v: set(g.neighbors(v)) for v in g.vertices}
    verts = list(g.vertices)
    placed: list[str] = []
    placed_set: set[str] = set()

    def up_condition_ok() -> bool:
        rank = {v: i for i, v in enumerate(placed)}
        return all(
            any(rank[w] > rank[v] for w in nbrs[v]) for v in placed[:-1]
        )

    def backtrack() -> Optional[list[str]]:
        if len(placed) == k:
            return list(placed) if up_condition_ok() else None
        for v in verts:
            if v in placed_set:
                continue
            if placed and not (nbrs[v] & placed_set):
                continue
            placed.append(v)
            placed_set.add(v)
            result = backtrack()
            placed.pop()
            placed_set.remove(v)
            if result is not None:
                return result
        return None

    found = backtrack()
    if found is None:
        return BipolarSearchResult(None, exhaustive=True)
    return BipolarSearchResult(
        BipolarNumbering({v: i + 1 for i, v in enumerate(found)}), exhaustive=True
    )


# ---------------------------------------------------------------------------
# Graph surgeries
# ---------------------------------------------------------------------------


def split_cycles_to_tree(g: CakeGraph) -> tuple[CakeGraph, dict[str, str]]:
    """Detach one endpoint of a cycle edge until the graph is a tree.

    Edge ids and parametrizations are preserved, so pieces translate verbatim
    between the tree and the original graph.  The returned map sends every
    vertex of the tree to the original vertex it stands for.
    """
    vertices = list(g.vertices)
    edges = [(e.id, e.u, e.v) for e in g.edges]
    origin = {v: v for v in vertices}
    counter = 0
    while True:
        work = CakeGraph(vertices, edges)
        bridges = find_bridges(work)
        cycle_edge = next((e for e in work.edges if e.id not in bridges), None)
        if cycle_edge is None:
            return work, origin
        clone = f"{cycle_edge.v}~{counter}"
        while clone in origin:
            counter += 1
            clone = f"{cycle_edge.v}~{counter}"
        counter += 1
        vertices.append(clone)
        origin[clone] = origin[cycle_edge.v]
        idx = next(i for i, (eid, _, _) in enumerate(edges) if eid == cycle_edge.id)
        edges[idx] = (cycle_edge.id, cycle_edge.u, clone)


class SubcakeMap:
    """Affine coordinate map between an induced subcake and its parent graph.

    Each edge of the subcake corresponds to one interval of the parent piece;
    the map preserves measure (lengths scale by the interval length).
    """

    def __init__(self, spans: Mapping[str, Interval]):
        self.spans = dict(spans)

    def to_parent_interval(self, sub: Interval) -> Interval:
        span = self.spans[sub.edge]
        width = span.hi - span.lo
        return Interval(span.edge, span.lo + sub.lo * width, span.lo + sub.hi * width)

    def piece_to_parent(self, p: Piece) -> Piece:
        return Piece.of(self.to_parent_interval(iv) for iv in p.intervals)

    def point_to_parent(self, edge_id: str, pos: Fraction) -> tuple[str, Fraction]:
        span = self.spans[edge_id]
        return span.edge, span.lo + pos * (span.hi - span.lo)


def induced_cake(g: CakeGraph, p: Piece) -> tuple[CakeGraph, SubcakeMap]:
    """Stand-alone cake graph whose edges are the intervals of a connected piece.

    Interval endpoints at original vertices keep their identity; interior
    endpoints become fresh vertices, so connectivity and measure carry over
    through the returned map.
    """
    if p.is_empty():
        raise DisconnectedPiece("cannot induce a cake from the empty piece")
    if not piece_is_connected(g, p):
        raise DisconnectedPiece("piece is not connected")
    vertices: list[str] = []
    seen: set[str] = set()
    taken = set(g.vertices)

    def vertex_for(edge: Edge, pos: Fraction) -> str:
        if pos == ZERO:
            name = edge.u
        elif pos == ONE:
            name = edge.v
        else:
            name = f"{edge.id}@{pos.numerator}/{pos.denominator}"
            while name in taken:
                name += "'"
        if name not in seen:
            seen.add(name)
            vertices.append(name)
        return name

    new_edges: list[tuple[str, str, str]] = []
    spans: dict[str, Interval] = {}
    counters: dict[str, int] = defaultdict(int)
    for iv in p.intervals:
        e = g.edge(iv.edge)
        k = counters[iv.edge]
        counters[iv.edge] += 1
        new_id = iv.edge if (iv.lo == ZERO and iv.hi == ONE) else f"{iv.edge}.{k}"
        a = vertex_for(e, iv.lo)
        b = vertex_for(e, iv.hi)
        new_edges.append((new_id, a, b))
        spans[new_id] = iv
    return CakeGraph(vertices, new_edges), SubcakeMap(spans)
