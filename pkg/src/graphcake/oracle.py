"""Desk-scale ground truth: exhaustive search over grid-cut allocations.

The cake is diced into atoms of length 1/d per edge; every allocation whose
cut points lie on that grid corresponds to an assignment of atoms to agents.
For maximization objectives the grid optimum is a lower bound on the true
supremum; on the bundled tight fixtures the optimum is attained at grid
points, so equality is the test.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .allocation import Allocation
from .errors import BudgetExceeded, DomainError
from .graph_core import Interval, Piece
from .valuation import Instance

OBJECTIVES = ("egal", "cost", "inequity")

ZERO = Fraction(0)


@dataclass(frozen=True)
class GridSearchConfig:
    denominator: int
    objective: str = "egal"  # egal: max welfare; cost: min egal cost; inequity: min
    piece_budget: Optional[int] = None
    require_complete: bool = False
    state_budget: int = 10_000_000

    def __post_init__(self):
        if self.denominator < 1:
            raise DomainError("grid denominator must be at least 1")
        if self.objective not in OBJECTIVES:
            raise DomainError(f"unknown objective {self.objective!r}")


class _AtomModel:
    """Atoms of length 1/d per edge, with adjacency masks and per-agent values."""

    def __init__(self, inst: Instance, d: int):
        self.inst = inst
        self.d = d
        g = inst.graph
        self.atoms: list[tuple[str, int]] = [(e.id, j) for e in g.edges for j in range(d)]
        index = {atom: i for i, atom in enumerate(self.atoms)}
        adj = [0] * len(self.atoms)
        for e in g.edges:
            for j in range(d - 1):
                a, b = index[(e.id, j)], index[(e.id, j + 1)]
                adj[a] |= 1 << b
                adj[b] |= 1 << a
        at_vertex: dict[str, list[int]] = {v: [] for v in g.vertices}
        for e in g.edges:
            at_vertex[e.u].append(index[(e.id, 0)])
            at_vertex[e.v].append(index[(e.id, d - 1)])
        for group in at_vertex.values():
            for a in group:
                for b in group:
                    if a != b:
                        adj[a] |= 1 << b
        self.adj = adj
        self.values = [
            [
                val.interval_value(e, Fraction(j, d), Fraction(j + 1, d))
                for (e, j) in self.atoms
            ]
            for val in inst.agents
        ]
        self.full_mask = (1 << len(self.atoms)) - 1

    def piece(self, mask: int) -> Piece:
        intervals = []
        for i, (e, j) in enumerate(self.atoms):
            if mask >> i & 1:
                intervals.append(Interval(e, Fraction(j, self.d), Fraction(j + 1, self.d)))
        return Piece.of(intervals)

    def value(self, agent: int, mask: int) -> Fraction:
        acc = ZERO
        vals = self.values[agent]
        while mask:
            low = mask & -mask
            acc += vals[low.bit_length() - 1]
            mask ^= low
        return acc

    def components(self, mask: int) -> list[int]:
        out = []
        rest = mask
        while rest:
            comp = rest & -rest
            frontier = comp
            while frontier:
                grown = comp
                m = frontier
                while m:
                    low = m & -m
                    grown |= self.adj[low.bit_length() - 1] & rest
                    m ^= low
                frontier = grown & ~comp
                comp = grown
            rest &= ~comp
            out.append(comp)
        return out

    def component_count(self, mask: int) -> int:
        return len(self.components(mask))

    def is_connected(self, mask: int) -> bool:
        return mask == 0 or self.component_count(mask) == 1


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self, amount: int = 1) -> None:
        self.used += amount
        if self.used > self.limit:
            raise BudgetExceeded(f"search exceeded the state budget of {self.limit}")


def _connected_subsets(
    model: _AtomModel, universe: int, agent: int, budget: _Budget
) -> Iterator[tuple[int, Fraction]]:
    """All nonempty connected subsets of ``universe`` with their value for ``agent``.

    Each subset appears exactly once: seeds are taken in increasing atom order
    and extensions already branched on are banned for later branches.
    """
    adj = model.adj
    vals = model.values[agent]

    def grow(
        current: int, value: Fraction, frontier: int, banned: int, allowed: int
    ) -> Iterator[tuple[int, Fraction]]:
        budget.spend()
        yield current, value
        ext = frontier & allowed & ~banned
        local_ban = banned
        while ext:
            pick = ext & -ext
            ext ^= pick
            bit = pick.bit_length() - 1
            new_frontier = (frontier | adj[bit]) & ~(current | pick)
            yield from grow(current | pick, value + vals[bit], new_frontier, local_ban, allowed)
            local_ban |= pick

    atoms = universe
    while atoms:
        seed = atoms & -atoms
        atoms ^= seed
        bit = seed.bit_length() - 1
        allowed = universe & ~(seed - 1) & ~seed
        yield from grow(seed, vals[bit], adj[bit] & ~seed, 0, allowed)


def _partitions(
    model: _AtomModel,
    n: int,
    require_complete: bool,
    budget: _Budget,
    prune: Optional[Callable[[Sequence[Fraction]], bool]] = None,
) -> Iterator[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
    """Tuples of pairwise-disjoint connected (possibly empty) atom sets with
    their per-agent values, covering all atoms when completeness is required."""

    def rec(
        agent: int, remaining: int, masks: tuple[int, ...], values: tuple[Fraction, ...]
    ) -> Iterator[tuple[tuple[int, ...], tuple[Fraction, ...]]]:
        if prune is not None and prune(values):
            return
        left = n - agent
        if require_complete and model.component_count(remaining) > left:
            return
        if agent == n - 1:
            if require_complete:
                if model.is_connected(remaining):
                    budget.spend()
                    yield masks + (remaining,), values + (model.value(agent, remaining),)
            else:
                budget.spend()
                yield masks + (0,), values + (ZERO,)
                for s, v in _connected_subsets(model, remaining, agent, budget):
                    yield masks + (s,), values + (v,)
            return
        yield from rec(agent + 1, remaining, masks + (0,), values + (ZERO,))
        for s, v in _connected_subsets(model, remaining, agent, budget):
            yield from rec(agent + 1, remaining & ~s, masks + (s,), values + (v,))

    yield from rec(0, model.full_mask, (), ())


def _assignment_key(model: _AtomModel, masks: Sequence[int], n: int) -> tuple[int, ...]:
    out = []
    for i in range(len(model.atoms)):
        owner = n  # unallocated sorts after every agent
        for a, mask in enumerate(masks):
            if mask >> i & 1:
                owner = a
                break
        out.append(owner)
    return tuple(out)


def grid_search_best(inst: Instance, cfg: GridSearchConfig) -> tuple[Fraction, Allocation]:
    """Exact optimum over all grid-cut allocations satisfying the config.

    Without a piece budget every agent's piece must be connected; with one,
    only the total number of connected pieces is bounded.  The witness is the
    lexicographically least optimal assignment of atoms to agents.
    """
    model = _AtomModel(inst, cfg.denominator)
    n = inst.n
    budget = _Budget(cfg.state_budget)
    maximize = cfg.objective == "egal"

    def objective(values: Sequence[Fraction]) -> Fraction:
        if cfg.objective == "egal":
            return min(values)
        if cfg.objective == "cost":
            return max(values)
        return max(values) - min(values)

    best: Optional[tuple[Fraction, Optional[tuple[int, ...]], tuple[int, ...]]] = None

    def consider(masks: tuple[int, ...], values: tuple[Fraction, ...]) -> None:
        nonlocal best
        score = objective(values)
        if best is None or (score > best[0] if maximize else score < best[0]):
            best = (score, None, masks)
            return
        if score == best[0]:
            key = _assignment_key(model, masks, n)
            incumbent = best[1] if best[1] is not None else _assignment_key(model, best[2], n)
            if key < incumbent:
                best = (score, key, masks)
            else:
                best = (best[0], incumbent, best[2])

    if cfg.piece_budget is not None:
        choices = n if cfg.require_complete else n + 1
        size = choices ** len(model.atoms)
        if size > cfg.state_budget:
            raise BudgetExceeded(
                f"{size} grid assignments exceed the state budget of {cfg.state_budget}"
            )
        for assignment in itertools.product(range(choices), repeat=len(model.atoms)):
            budget.spend()
            masks = [0] * n
            for i, owner in enumerate(assignment):
                if owner < n:
                    masks[owner] |= 1 << i
            if sum(model.component_count(m) for m in masks) > cfg.piece_budget:
                continue
            consider(tuple(masks), tuple(model.value(a, m) for a, m in enumerate(masks)))
    else:
        prune = None
        if cfg.objective == "cost":
            # costs only grow with atoms, so a prefix already above the
            # incumbent optimum cannot lead to an improvement
            def prune(values: Sequence[Fraction]) -> bool:
                return best is not None and any(v > best[0] for v in values)

        for masks, values in _partitions(model, n, cfg.require_complete, budget, prune):
            consider(masks, values)

    if best is None:
        raise DomainError("search space is empty")
    return best[0], Allocation(tuple(model.piece(m) for m in best[2]))


def pair_feasible(
    inst: Instance,
    d: int,
    first_threshold: Fraction,
    second_threshold: Fraction,
    first_strict: bool = False,
    second_strict: bool = False,
    flexible: bool = True,
    require_complete: bool = False,
    state_budget: int = 10_000_000,
) -> tuple[bool, Optional[Allocation]]:
    """Is there a grid-cut connected allocation meeting both value thresholds?

    With ``flexible`` the two thresholds may go to the agents in either order.
    Values are monotone in atoms, so for the second agent it suffices to test
    whole components of the complement (or the complement itself when the
    allocation must be complete).
    """
    if inst.n != 2:
        raise DomainError("pair search is defined for two agents")
    model = _AtomModel(inst, d)
    budget = _Budget(state_budget)

    def meets(value: Fraction, threshold: Fraction, strict: bool) -> bool:
        return value > threshold if strict else value >= threshold

    orders = [(first_threshold, first_strict, second_threshold, second_strict)]
    if flexible:
        orders.append((second_threshold, second_strict, first_threshold, first_strict))
    for t0, s0, t1, s1 in orders:
        first_candidates = itertools.chain(
            [(0, ZERO)], _connected_subsets(model, model.full_mask, 0, budget)
        )
        for s0_mask, v0 in first_candidates:
            if not meets(v0, t0, s0):
                continue
            complement = model.full_mask & ~s0_mask
            if require_complete:
                options = [complement] if model.is_connected(complement) else []
            else:
                options = [0] + model.components(complement)
            for s1_mask in options:
                if meets(model.value(1, s1_mask), t1, s1):
                    masks = (s0_mask, s1_mask)
                    return True, Allocation(tuple(model.piece(m) for m in masks))
    return False, None


def check_powers_of_three(
    t: int, a_lo: int, a_hi: int, state_budget: int = 10_000_000
) -> tuple[bool, tuple[tuple[int, ...], tuple[int, ...]], Fraction]:
    """Exhaustively check that signed sums of t powers of three stay at least
    1/(2*3^t) away from one half.

    Enumerates every multiset of exponents in [a_lo, a_hi] and every
    coefficient vector over {-2, -1, 1, 2}; returns whether the bound holds,
    the first minimizing assignment (exponents, coefficients), and the gap.
    """
    if not 1 <= t <= 6:
        raise DomainError("t must be between 1 and 6")
    if a_lo > a_hi or a_hi - a_lo + 1 > 10:
        raise DomainError("exponent window must be nonempty and at most 10 wide")
    exponents = range(a_lo, a_hi + 1)
    count = 0
    half = Fraction(1, 2)
    best_gap: Optional[Fraction] = None
    best_assignment: Optional[tuple[tuple[int, ...], tuple[int, ...]]] = None
    for exps in itertools.combinations_with_replacement(exponents, t):
        powers = [Fraction(3) ** a for a in exps]
        for coefs in itertools.product((-2, -1, 1, 2), repeat=t):
            count += 1
            if count > state_budget:
                raise BudgetExceeded(f"enumeration exceeded {state_budget} states")
            total = sum((c * p for c, p in zip(coefs, powers)), ZERO)
            gap = abs(total - half)
            if best_gap is None or gap < best_gap:
                best_gap = gap
                best_assignment = (exps, coefs)
    assert best_gap is not None and best_assignment is not None
    bound = Fraction(1, 2 * 3**t)
    return best_gap >= bound, best_assignment, best_gap
