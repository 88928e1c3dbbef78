"""Instance builders: worst-case constructions used as tightness anchors, plus a
seeded random-instance generator."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import BadParameters, UnknownFixture
from .graph_core import CakeGraph, ONE, ZERO
from .valuation import Instance, Segment, Valuation

F = Fraction


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    params: Mapping[str, object] = field(default_factory=dict)


def _star(k: int) -> CakeGraph:
    vertices = ["c"] + [f"l{i}" for i in range(k)]
    edges = [(f"e{i}", "c", f"l{i}") for i in range(k)]
    return CakeGraph(vertices, edges)


def _identical(graph: CakeGraph, n: int, edge_values: Mapping[str, Fraction], mode: str) -> Instance:
    v = Valuation.from_edge_values(edge_values)
    return Instance(graph, tuple(v for _ in range(n)), mode)


def _star_tight(n: int) -> Instance:
    if n < 2:
        raise BadParameters("star_tight needs n >= 2")
    k = 2 * n - 1
    g = _star(k)
    return _identical(g, n, {e.id: F(1, k) for e in g.edges}, "cake")


def _star_fnk_tight(n: int, k: int) -> Instance:
    from .protocols import f_guarantee

    if n < 2 or k < 3:
        raise BadParameters("star_fnk_tight needs n >= 2 and k >= 3")
    g = _star(k)
    share = f_guarantee(n, k)
    if k >= 2 * n - 1:
        values = {f"e{i}": (F(1, 2 * n - 1) if i < 2 * n - 1 else F(0)) for i in range(k)}
    else:
        values = {f"e{i}": share for i in range(k - 1)}
        values[f"e{k - 1}"] = 1 - (k - 1) * share
    return _identical(g, n, values, "cake")


def _three_bridge() -> Instance:
    g = _star(3)
    return _identical(g, 2, {e.id: F(1, 3) for e in g.edges}, "cake")


def _frontier_edge(alpha: Fraction) -> Instance:
    if not F(1, 2) < alpha < 1:
        raise BadParameters("frontier_edge needs 1/2 < alpha < 1")
    g = CakeGraph(["a", "b"], [("e0", "a", "b")])
    v1 = Valuation.from_edge_values({"e0": F(1)})
    width = 2 * alpha - 1
    v2 = Valuation(
        {
            "e0": (
                Segment(ZERO, 1 - alpha, ZERO),
                Segment(1 - alpha, alpha, 1 / width),
                Segment(alpha, ONE, ZERO),
            )
        }
    )
    return Instance(g, (v1, v2), "cake")


def _four_edge_star() -> Instance:
    g = _star(4)
    return _identical(g, 2, {e.id: F(1, 4) for e in g.edges}, "cake")


def _fig2(alpha: Fraction, eps: Fraction) -> Instance:
    if not (0 < alpha <= F(1, 4)):
        raise BadParameters("fig2 needs 0 < alpha <= 1/4")
    if not (0 < eps < alpha):
        raise BadParameters("fig2 needs 0 < eps < alpha")
    g = CakeGraph(
        ["h1", "h2", "a", "b", "c", "d"],
        [
            ("left1", "a", "h1"),
            ("left2", "b", "h1"),
            ("mid", "h1", "h2"),
            ("right1", "h2", "c"),
            ("right2", "h2", "d"),
        ],
    )
    leaf = alpha - eps
    values = {
        "left1": leaf,
        "left2": leaf,
        "mid": 1 - 4 * alpha + 4 * eps,
        "right1": leaf,
        "right2": leaf,
    }
    return _identical(g, 2, values, "cake")


def _fig1_flowers(side: str) -> Instance:
    if side == "left":
        # triangle with a two-edge cycle pendant hanging off each corner
        vertices = ["t0", "t1", "t2", "p0", "p1", "p2"]
        edges = [("tri0", "t0", "t1"), ("tri1", "t1", "t2"), ("tri2", "t2", "t0")]
        for i in range(3):
            edges.append((f"pet{i}a", f"t{i}", f"p{i}"))
            edges.append((f"pet{i}b", f"t{i}", f"p{i}"))
    elif side == "right":
        # triangle with a triangle pendant sharing each corner
        vertices = ["t0", "t1", "t2"]
        edges = [("tri0", "t0", "t1"), ("tri1", "t1", "t2"), ("tri2", "t2", "t0")]
        for i in range(3):
            vertices += [f"x{i}", f"y{i}"]
            edges += [
                (f"pet{i}a", f"t{i}", f"x{i}"),
                (f"pet{i}b", f"x{i}", f"y{i}"),
                (f"pet{i}c", f"y{i}", f"t{i}"),
            ]
    else:
        raise BadParameters("fig1_flowers side must be 'left' or 'right'")
    g = CakeGraph(vertices, edges)
    return _identical(g, 2, {e.id: F(1, g.m) for e in g.edges}, "cake")


def _ternary_tree(k: int) -> Instance:
    if k < 1:
        raise BadParameters("ternary_tree needs k >= 1")
    vertices = ["root", "n"]
    edges = [("trunk", "root", "n")]
    frontier = ["n"]
    for layer in range(k):
        nxt = []
        for v in frontier:
            for j in range(3):
                child = f"{v}.{j}"
                vertices.append(child)
                edges.append((f"e{child}", v, child))
                nxt.append(child)
        frontier = nxt
    g = CakeGraph(vertices, edges)
    leaf_value = F(1, 3**k)
    values = {f"e{v}": leaf_value for v in frontier}
    return _identical(g, 2, values, "cake")


def _equit_star3() -> Instance:
    g = _star(3)
    return _identical(g, 2, {e.id: F(1, 3) for e in g.edges}, "cake")


def _chore_star(n: int) -> Instance:
    if n < 1:
        raise BadParameters("chore_star needs n >= 1")
    g = _star(n + 1)
    return _identical(g, n, {e.id: F(1, n + 1) for e in g.edges}, "chore")


_CATALOG = {
    "star_tight": (("n",), _star_tight),
    "star_fnk_tight": (("n", "k"), _star_fnk_tight),
    "three_bridge": ((), _three_bridge),
    "frontier_edge": (("alpha",), _frontier_edge),
    "four_edge_star": ((), _four_edge_star),
    "fig2": (("alpha", "eps"), _fig2),
    "fig1_flowers": (("side",), _fig1_flowers),
    "ternary_tree": (("k",), _ternary_tree),
    "equit_star3": ((), _equit_star3),
    "chore_star": (("n",), _chore_star),
}

FIXTURE_NAMES = tuple(sorted(_CATALOG))

FIXTURE_DEFAULTS = {"fig2": {"alpha": F(1, 4), "eps": F(1, 100)}, "fig1_flowers": {"side": "left"}}


def build_fixture(spec: FixtureSpec) -> Instance:
    """Build a catalog instance; parameters outside their ranges raise BadParameters."""
    if spec.name not in _CATALOG:
        raise UnknownFixture(f"unknown fixture {spec.name!r}; known: {', '.join(FIXTURE_NAMES)}")
    arg_names, builder = _CATALOG[spec.name]
    params = dict(FIXTURE_DEFAULTS.get(spec.name, {}))
    params.update(spec.params)
    missing = [a for a in arg_names if a not in params]
    if missing:
        raise BadParameters(f"fixture {spec.name!r} needs parameters: {', '.join(missing)}")
    extra = [p for p in params if p not in arg_names]
    if extra:
        raise BadParameters(f"fixture {spec.name!r} got unknown parameters: {', '.join(extra)}")

    def coerce(name: str, value):
        if name in ("n", "k"):
            return int(value)
        if name in ("alpha", "eps"):
            return Fraction(value)
        return value

    return builder(*(coerce(a, params[a]) for a in arg_names))


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

FAMILIES = ("tree", "star", "cycle-augmented", "arbitrary")


def _random_tree(rng: random.Random, m: int) -> CakeGraph:
    vertices = [f"v{i}" for i in range(m + 1)]
    edges = []
    for i in range(1, m + 1):
        parent = rng.randrange(i)
        edges.append((f"e{i - 1}", f"v{parent}", f"v{i}"))
    return CakeGraph(vertices, edges)


def _random_cycle_augmented(rng: random.Random, m: int) -> CakeGraph:
    """Built by ear additions, so the result is always almost bridgeless."""
    base = rng.randint(1, max(1, m // 2))
    vertices = [f"v{i}" for i in range(base + 1)]
    edges = [(f"e{i}", f"v{i}", f"v{i + 1}") for i in range(base)]
    next_v = base + 1
    next_e = base
    while next_e < m:
        remaining = m - next_e
        ear_len = rng.randint(1, min(3, remaining))
        start = rng.choice(vertices)
        end = rng.choice(vertices)
        if ear_len == 1 and start == end:
            end = rng.choice([v for v in vertices if v != start] or [start])
            if start == end:
                ear_len = 2
        inner = []
        for _ in range(ear_len - 1):
            inner.append(f"v{next_v}")
            next_v += 1
        chain = [start] + inner + [end]
        for a, b in zip(chain, chain[1:]):
            edges.append((f"e{next_e}", a, b))
            next_e += 1
        vertices.extend(inner)
    return CakeGraph(vertices, edges)


def _random_arbitrary(rng: random.Random, m: int) -> CakeGraph:
    tree_edges = rng.randint(1, m)
    g = _random_tree(rng, tree_edges)
    vertices = list(g.vertices)
    edges = [(e.id, e.u, e.v) for e in g.edges]
    for j in range(tree_edges, m):
        u = rng.choice(vertices)
        v = rng.choice([w for w in vertices if w != u] or [u])
        if u == v:
            continue
        edges.append((f"e{j}", u, v))
    return CakeGraph(vertices, edges)


def random_valuations(
    rng: random.Random, g: CakeGraph, n: int, max_segments: int = 4
) -> tuple[Valuation, ...]:
    """Normalized piecewise-constant valuations with small rational breakpoints."""
    agents = []
    for _ in range(n):
        densities = {}
        for e in g.edges:
            segs = rng.randint(1, max_segments)
            cuts = sorted(rng.sample([F(i, 8) for i in range(1, 8)], segs - 1))
            bounds = [ZERO] + cuts + [ONE]
            weights = [F(rng.randint(0, 9)) for _ in range(segs)]
            densities[e.id] = tuple(
                Segment(lo, hi, w) for lo, hi, w in zip(bounds, bounds[1:], weights)
            )
        v = Valuation(densities)
        total = v.total()
        if total == 0:
            edge = rng.choice(g.edges)
            densities[edge.id] = (Segment(ZERO, ONE, F(1)),)
            v = Valuation(densities)
            total = v.total()
        agents.append(v.scaled(1 / total))
    return tuple(agents)


def random_instance(
    seed: int,
    n: int = 2,
    family: str = "tree",
    edges: int = 4,
    max_segments: int = 4,
    mode: str = "cake",
) -> Instance:
    """Deterministic random instance; identical arguments give identical output."""
    if not 1 <= n <= 8:
        raise BadParameters("n must be between 1 and 8")
    if not 1 <= edges <= 12:
        raise BadParameters("edge count must be between 1 and 12")
    if not 1 <= max_segments <= 4:
        raise BadParameters("max_segments must be between 1 and 4")
    if family not in FAMILIES:
        raise BadParameters(f"unknown family {family!r}; known: {', '.join(FAMILIES)}")
    rng = random.Random(f"graphcake/{seed}/{n}/{family}/{edges}/{max_segments}")
    if family == "tree":
        g = _random_tree(rng, edges)
    elif family == "star":
        g = _star(max(2, edges))
    elif family == "cycle-augmented":
        g = _random_cycle_augmented(rng, edges)
    else:
        g = _random_arbitrary(rng, edges)
    return Instance(g, random_valuations(rng, g, n, max_segments), mode)
