import random
from fractions import Fraction

from graphcake.graph_core import CakeGraph, Interval, Piece
from graphcake.valuation import Instance, Valuation

F = Fraction


def single_edge_graph():
    return CakeGraph(["a", "b"], [("e0", "a", "b")])


def triangle():
    return CakeGraph(["a", "b", "c"], [("e0", "a", "b"), ("e1", "b", "c"), ("e2", "c", "a")])


def path_graph(m):
    vertices = [f"v{i}" for i in range(m + 1)]
    edges = [(f"e{i}", f"v{i}", f"v{i+1}") for i in range(m)]
    return CakeGraph(vertices, edges)


def star_graph(k):
    vertices = ["c"] + [f"l{i}" for i in range(k)]
    return CakeGraph(vertices, [(f"e{i}", "c", f"l{i}") for i in range(k)])


def uniform_instance(g, n, mode="cake"):
    v = Valuation.uniform(g)
    return Instance(g, tuple(v for _ in range(n)), mode)


def edge_piece(*edge_ids):
    return Piece.of(Interval(e, F(0), F(1)) for e in edge_ids)


def random_multigraph(rng: random.Random, max_edges=6):
    """Small connected loopless multigraph (not necessarily almost bridgeless)."""
    m = rng.randint(1, max_edges)
    nv = rng.randint(2, m + 1)
    while True:
        vertices = [f"v{i}" for i in range(nv)]
        edges = []
        for j in range(m):
            u, v = rng.sample(range(nv), 2)
            edges.append((f"e{j}", f"v{u}", f"v{v}"))
        try:
            return CakeGraph(vertices, edges)
        except Exception:
            nv = max(2, nv - 1)
