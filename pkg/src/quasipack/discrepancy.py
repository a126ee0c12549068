"""Checking and falsifying Disc(I, >=p, mu) and the two-sided Disc(I, p, mu).

Deciding Disc quantifies over every layout, so verdicts say how they were
reached: ``satisfied_exhaustive`` (all layouts enumerated), ``violated``
(with a witness layout that re-checks), or ``undetermined`` (heuristic search
found nothing). All margins are exact ``Fraction`` values.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, prod
from typing import Sequence

from ._search import Constraint, InjectiveSearch
from .errors import CapExceeded, InvalidParameters
from .hypercore import KGraph
from .layouts import Antichain, Layout, count_cliques, intersect_count, serialize_layout

LOWER = "lower"
TWO_SIDED = "two_sided"

SATISFIED = "satisfied_exhaustive"
VIOLATED = "violated"
UNDETERMINED = "undetermined"

__all__ = [
    "DiscParams",
    "DiscVerdict",
    "check_witness",
    "edge_density_disc",
    "search_violation",
    "exhaustive_check",
    "layout_space_size",
    "serialize_verdict",
]


@dataclass(frozen=True)
class DiscParams:
    p: Fraction
    mu: Fraction
    mode: str = LOWER

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "mu", Fraction(self.mu))
        if not 0 < self.p < 1 or not 0 < self.mu < 1:
            raise InvalidParameters(f"need 0 < p, mu < 1, got p={self.p} mu={self.mu}")
        if self.mode not in (LOWER, TWO_SIDED):
            raise InvalidParameters(f"mode must be {LOWER!r} or {TWO_SIDED!r}")


@dataclass(frozen=True)
class DiscVerdict:
    status: str
    margin: Fraction
    witness: Layout | None = None
    moves: int = 0

    def __post_init__(self):
        if (self.witness is not None) != (self.status == VIOLATED):
            raise InvalidParameters("a witness accompanies exactly the violated verdicts")

    @property
    def violated(self) -> bool:
        return self.status == VIOLATED


def _margin(inter: int, cliques: int, n: int, k: int, params: DiscParams) -> Fraction:
    slack = params.mu * n**k
    if params.mode == LOWER:
        return inter - params.p * cliques + slack
    return slack - abs(inter - params.p * cliques)


def check_witness(H: KGraph, L: Layout, params: DiscParams) -> tuple[bool, Fraction]:
    """Evaluate one layout. Returns ``(holds, margin)``; it holds iff margin >= 0."""
    if L.k != H.k or L.n != H.n:
        raise InvalidParameters("layout must live on V(H) with ground k")
    m = _margin(intersect_count(H, L), count_cliques(L), H.n, H.k, params)
    return m >= 0, m


def edge_density_disc(H: KGraph, params: DiscParams) -> bool:
    """Disc({∅}) in closed form: compare |H| with p*C(n,k) up to mu*n^k/k!."""
    n, k = H.n, H.k
    dev = len(H.edges) - params.p * comb(n, k)
    slack = params.mu * Fraction(n**k, factorial(k))
    if params.mode == LOWER:
        return dev >= -slack
    return abs(dev) <= slack


def layout_space_size(n: int, A: Antichain) -> int:
    return prod(2 ** comb(n, len(m)) for m in A.members)


class _Climber:
    """Incremental clique counts for a layout under single-edge toggles."""

    def __init__(self, H: KGraph, A: Antichain, edges: dict):
        self.H = H
        self.A = A
        self.graphs = {m: KGraph(len(m), H.n, frozenset(edges[m])) for m in A.members}

    def layout(self) -> Layout:
        return Layout(self.A, self.H.n, {m: g.edges for m, g in self.graphs.items()})

    def _counts(self, graphs, fixed=None) -> tuple[int, int]:
        cons = []
        for m, g in graphs.items():
            if not m:
                if () not in g.edges:
                    return 0, 0
                continue
            cons.append(Constraint(tuple(i - 1 for i in m), g))
        if self.H.n < self.H.k:
            return 0, 0
        k, n = self.H.k, self.H.n
        order = list(fixed or ()) + [v for v in range(k) if v not in (fixed or {})]
        cliques = InjectiveSearch(k, n, cons, fixed=fixed, order=order).count()
        if not cliques:
            return 0, 0
        cons.append(Constraint(tuple(range(k)), self.H))
        inter = InjectiveSearch(k, n, cons, fixed=fixed, order=order).count()
        return inter, cliques

    def totals(self) -> tuple[int, int]:
        return self._counts(self.graphs)

    def toggle_delta(self, member, edge) -> tuple[int, int, KGraph]:
        """Change in (intersect, cliques) from toggling ``edge`` in lambda_member."""
        g = self.graphs[member]
        present = edge in g.edges
        new = KGraph(g.k, g.n, g.edges - {edge} if present else g.edges | {edge})
        if not member:
            after = self._counts({**self.graphs, member: new})
            before = self.totals()
            return after[0] - before[0], after[1] - before[1], new
        with_edge = {**self.graphs, member: g if present else new}
        di = dc = 0
        for perm in itertools.permutations(edge):
            fixed = {pos - 1: v for pos, v in zip(member, perm)}
            i, c = self._counts(with_edge, fixed)
            di += i
            dc += c
        sign = -1 if present else 1
        return sign * di, sign * dc, new


def _random_edges(A: Antichain, n: int, rng: random.Random) -> dict:
    return {
        m: {e for e in itertools.combinations(range(n), len(m)) if rng.random() < 0.5}
        for m in A.members
    }


def search_violation(
    H: KGraph,
    A: Antichain,
    params: DiscParams,
    budget: int = 2000,
    seed: int = 0,
    *,
    restarts: int = 4,
    plateau: int = 20,
    initial: Sequence[Layout] = (),
) -> DiscVerdict:
    """Seeded hill-climbing for a violating layout.

    Restarts begin from the ``initial`` layouts (structure-aware seeds), then
    from uniformly random layouts; restart ``r`` uses ``random.Random(f"{seed}:{r}")``.
    Each move toggles one edge of one lambda_I and is kept if the margin does
    not grow (at most ``plateau`` consecutive sideways moves). ``budget``
    bounds the total number of evaluated moves. Never reports satisfaction.
    """
    if A.ground != H.k:
        raise InvalidParameters("antichain must live on [k]")
    n, k = H.n, H.k
    best_margin = None
    moves = 0
    starts: list = list(initial) + [None] * restarts
    per_restart = max(1, budget // max(1, len(starts)))
    for r, start in enumerate(starts):
        rng = random.Random(f"{seed}:{r}")
        if start is not None:
            if start.antichain != A or start.n != n:
                raise InvalidParameters("initial layout does not match the antichain or n")
            edges = {m: set(start.edges[m]) for m in A.members}
        else:
            edges = _random_edges(A, n, rng)
        climber = _Climber(H, A, edges)
        inter, cliques = climber.totals()
        margin = _margin(inter, cliques, n, k, params)
        sideways = 0
        for _ in range(per_restart):
            if margin < 0 or moves >= budget:
                break
            moves += 1
            member = rng.choice(A.members)
            edge = tuple(sorted(rng.sample(range(n), len(member))))
            di, dc, new = climber.toggle_delta(member, edge)
            cand = _margin(inter + di, cliques + dc, n, k, params)
            if cand < margin or (cand == margin and sideways < plateau):
                sideways = sideways + 1 if cand == margin else 0
                climber.graphs[member] = new
                inter, cliques, margin = inter + di, cliques + dc, cand
        if best_margin is None or margin < best_margin:
            best_margin = margin
        if margin < 0:
            return DiscVerdict(VIOLATED, margin, climber.layout(), moves)
    return DiscVerdict(UNDETERMINED, best_margin if best_margin is not None else Fraction(0), None, moves)


def exhaustive_check(H: KGraph, A: Antichain, params: DiscParams, cap: int = 1 << 16) -> DiscVerdict:
    """Enumerate every A-layout on V(H). Raises ``CapExceeded`` past ``cap`` layouts."""
    if A.ground != H.k:
        raise InvalidParameters("antichain must live on [k]")
    n, k = H.n, H.k
    total = layout_space_size(n, A)
    if total > cap:
        raise CapExceeded(total, cap)
    pools = [list(itertools.combinations(range(n), len(m))) for m in A.members]
    worst = None
    for masks in itertools.product(*(range(1 << len(pool)) for pool in pools)):
        edges = {
            m: frozenset(e for bit, e in enumerate(pool) if mask >> bit & 1)
            for m, pool, mask in zip(A.members, pools, masks)
        }
        L = Layout(A, n, edges)
        holds, margin = check_witness(H, L, params)
        if not holds:
            return DiscVerdict(VIOLATED, margin, L, total)
        if worst is None or margin < worst:
            worst = margin
    return DiscVerdict(SATISFIED, worst if worst is not None else Fraction(0), None, total)


def serialize_verdict(v: DiscVerdict) -> str:
    m = v.margin
    out = f"status {v.status}\nmargin {m.numerator}/{m.denominator}\n"
    if v.witness is not None:
        out += serialize_layout(v.witness)
    return out
