"""Perfect F-packings: exact search, greedy almost-packings and the absorbing pipeline.

A copy of F is a tuple ``img`` with ``img[w]`` the host vertex of F-vertex w.
The pipeline mirrors the absorbing method: set aside a family of disjoint
absorbers, pack the rest greedily, then let the absorbers swallow the
leftover. Absorbers come from embeddings of the grid graph whose zeroth row
is pinned to a target b-set.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, factorial
from typing import Iterable, Sequence

from ._search import Constraint, InjectiveSearch
from .adapted import grid_graph
from .errors import BudgetExceeded, InsufficientAbsorbers, InvalidParameters, PackingFailure
from .hypercore import KGraph

log = logging.getLogger(__name__)

__all__ = [
    "Packing",
    "AbsorberParams",
    "AbsorbingFamily",
    "RichnessReport",
    "PackReport",
    "find_copy",
    "is_perfect_packing",
    "is_valid_packing",
    "exact_perfect_packing",
    "greedy_packing",
    "is_absorber",
    "find_absorbers",
    "richness_estimate",
    "build_absorbing_family",
    "absorb_pack",
    "serialize_packing",
]


@dataclass(frozen=True)
class Packing:
    copies: tuple[tuple[int, ...], ...] = ()

    def vertices(self) -> set[int]:
        return {v for c in self.copies for v in c}

    def __len__(self):
        return len(self.copies)

    def __add__(self, other: "Packing") -> "Packing":
        return Packing(self.copies + other.copies)


def serialize_packing(P: Packing) -> str:
    return "".join(" ".join(f"{w}->{h}" for w, h in enumerate(c)) + "\n" for c in P.copies)


def _copy_ok(H: KGraph, F: KGraph, img: Sequence[int]) -> bool:
    if len(img) != F.n or len(set(img)) != F.n or any(not 0 <= h < H.n for h in img):
        return False
    return all(tuple(sorted(img[v] for v in e)) in H.edges for e in F.edges)


def is_valid_packing(H: KGraph, F: KGraph, P: Packing) -> bool:
    """Every copy is edge-preserving and the copies are pairwise disjoint."""
    if H.k != F.k:
        raise InvalidParameters("uniformity mismatch")
    seen: set[int] = set()
    for img in P.copies:
        if not _copy_ok(H, F, img) or seen.intersection(img):
            return False
        seen.update(img)
    return True


def is_perfect_packing(H: KGraph, F: KGraph, P: Packing) -> bool:
    return is_valid_packing(H, F, P) and P.vertices() == set(range(H.n))


def find_copy(
    F: KGraph,
    H: KGraph,
    allowed: Iterable[int] | None = None,
    *,
    pins: dict[int, int] | None = None,
    rng: random.Random | None = None,
    node_cap: int | None = None,
) -> tuple[int, ...] | None:
    """One copy of F inside ``allowed`` (default: all of V(H)), or None."""
    allowed = None if allowed is None else frozenset(allowed)
    search = InjectiveSearch(
        F.n, H.n, [Constraint(e, H) for e in F.sorted_edges], allowed=allowed, fixed=pins, node_cap=node_cap
    )
    return search.first(rng)


def _hosts(H: KGraph, F: KGraph, S: frozenset[int], cache: dict) -> bool:
    if S not in cache:
        inside = sum(e in H.edges for e in itertools.combinations(sorted(S), H.k))
        cache[S] = inside >= len(F.edges) and find_copy(F, H, S) is not None
    return cache[S]


def exact_perfect_packing(
    H: KGraph, F: KGraph, budget: int | None = 200_000, *, within: Iterable[int] | None = None
) -> Packing | None:
    """Exact-cover search for a perfect F-packing of H (or of H[within]).

    Returns None when none exists (including v(F) not dividing the vertex
    count); raises ``BudgetExceeded`` after ``budget`` search nodes.
    """
    if H.k != F.k:
        raise InvalidParameters("uniformity mismatch")
    verts = frozenset(range(H.n) if within is None else within)
    f = F.n
    if f == 0:
        raise InvalidParameters("F must have at least one vertex")
    if len(verts) % f:
        log.debug("no packing: %d vertices, v(F)=%d", len(verts), f)
        return None
    if not verts:
        return Packing()
    host_cache: dict = {}
    options: dict[int, list[frozenset[int]]] = {}

    def through(v: int) -> list[frozenset[int]]:
        if v not in options:
            others = sorted(verts - {v})
            options[v] = [
                S
                for rest in itertools.combinations(others, f - 1)
                if _hosts(H, F, S := frozenset(rest + (v,)), host_cache)
            ]
        return options[v]

    nodes = 0
    failed: set[frozenset[int]] = set()

    def rec(uncovered: frozenset[int]) -> list[frozenset[int]] | None:
        nonlocal nodes
        if not uncovered:
            return []
        if uncovered in failed:
            return None
        nodes += 1
        if budget is not None and nodes > budget:
            raise BudgetExceeded(f"exact packing exceeded {budget} nodes", nodes)
        best = None
        for v in sorted(uncovered):
            live = [S for S in through(v) if S <= uncovered]
            if best is None or len(live) < len(best):
                best = live
                if not live:
                    break
        for S in best:
            sub = rec(uncovered - S)
            if sub is not None:
                return [S] + sub
        failed.add(uncovered)
        return None

    blocks = rec(verts)
    if blocks is None:
        return None
    return Packing(tuple(find_copy(F, H, S) for S in sorted(blocks, key=min)))


def greedy_packing(
    H: KGraph,
    F: KGraph,
    b: int,
    seed: int,
    *,
    adjust: bool = True,
    node_cap: int = 5_000,
    within: Iterable[int] | None = None,
) -> tuple[Packing, tuple[int, ...]]:
    """Greedily remove copies of F until none is left; return (packing, leftover).

    Each copy is first sought by a randomized search capped at ``node_cap``
    nodes, then by a full deterministic sweep. With ``adjust`` and v(F)
    dividing the vertex count, y copies are dissolved into the leftover,
    y = -|C|/f mod b/f, so that b divides the leftover size.
    """
    f = F.n
    if f == 0 or b % f:
        raise InvalidParameters(f"v(F)={f} must divide b={b}")
    rng = random.Random(seed)
    remaining = set(range(H.n) if within is None else within)
    total = len(remaining)
    copies: list[tuple[int, ...]] = []
    while len(remaining) >= f:
        img = None
        try:
            img = find_copy(F, H, remaining, rng=rng, node_cap=node_cap)
        except BudgetExceeded:
            pass
        if img is None:
            img = find_copy(F, H, remaining)
        if img is None:
            break
        copies.append(img)
        remaining.difference_update(img)
    leftover = set(remaining)
    if adjust and total % f == 0:
        y = (-(len(leftover) // f)) % (b // f)
        y = min(y, len(copies))
        for _ in range(y):
            leftover.update(copies.pop())
    return Packing(tuple(copies)), tuple(sorted(leftover))


def is_absorber(
    H: KGraph, F: KGraph, A: Iterable[int], B: Iterable[int], budget: int | None = 200_000
) -> bool | None:
    """True iff H[A] and H[A ∪ B] both have perfect F-packings; None if the budget ran out."""
    A, B = frozenset(A), frozenset(B)
    if A & B:
        raise InvalidParameters("A and B must be disjoint")
    if len(A) % F.n or (len(A) + len(B)) % F.n:
        raise InvalidParameters(f"v(F)={F.n} must divide |A| and |A|+|B|")
    try:
        if exact_perfect_packing(H, F, budget, within=A) is None:
            return False
        return exact_perfect_packing(H, F, budget, within=A | B) is not None
    except BudgetExceeded:
        return None


def find_absorbers(
    H: KGraph,
    F: KGraph,
    B: Sequence[int],
    budget: int = 20_000,
    seed: int = 0,
    *,
    special: int = 0,
    max_orderings: int = 24,
) -> list[tuple[int, ...]]:
    """Absorbers for B from embeddings of the grid graph with B as its zeroth row.

    Tries every ordering of B when there are at most ``max_orderings``,
    otherwise a seeded sample. Each returned (f^2 - f)-set re-verifies with
    ``is_absorber``.
    """
    B = tuple(B)
    f = F.n
    if len(B) != f or len(set(B)) != f:
        raise InvalidParameters(f"B must consist of v(F)={f} distinct vertices")
    rng = random.Random(seed)
    grid = grid_graph(F, special)
    cons = [Constraint(e, H) for e in grid.graph.sorted_edges]
    if factorial(f) <= max_orderings:
        orderings = list(itertools.permutations(B))
    else:
        orderings = [tuple(rng.sample(B, f)) for _ in range(max_orderings)]
    found: list[tuple[int, ...]] = []
    for order in orderings:
        pins = dict(zip(grid.zeroth_row, order))
        try:
            img = InjectiveSearch(f * f, H.n, cons, fixed=pins, node_cap=budget).first(rng)
        except BudgetExceeded:
            continue
        if img is None:
            continue
        A = tuple(sorted(img[x] for x in grid.rows(1)))
        if A not in found and is_absorber(H, F, A, B):
            found.append(A)
    return found


@dataclass(frozen=True)
class AbsorberParams:
    """Absorber size ``a``, absorbed-set size ``b``, candidate acceptance rate
    ``epsilon`` and leftover fraction ``omega``. Use ``for_graph`` for defaults."""

    a: int
    b: int
    epsilon: Fraction = Fraction(1, 2)
    omega: Fraction = Fraction(1, 16)

    @classmethod
    def for_graph(cls, F: KGraph, **overrides) -> "AbsorberParams":
        f = F.n
        base = dict(a=f * f - f, b=f, epsilon=Fraction(1, 2), omega=Fraction(1, 4 * f * f))
        base.update(overrides)
        return cls(**base)

    def check(self, F: KGraph) -> None:
        f = F.n
        if self.a % f or self.b % f or self.a <= 0 or self.b <= 0:
            raise InvalidParameters(f"v(F)={f} must divide a={self.a} and b={self.b}")
        if not 0 < self.epsilon < 1 or not 0 < self.omega < 1:
            raise InvalidParameters("epsilon and omega must lie in (0, 1)")


@dataclass(frozen=True)
class RichnessReport:
    fraction: Fraction
    per_b: tuple[Fraction, ...]

    @property
    def minimum(self) -> Fraction:
        return min(self.per_b) if self.per_b else Fraction(0)


def richness_estimate(
    H: KGraph, F: KGraph, params: AbsorberParams, trials: int, seed: int, *, per_b: int = 4
) -> RichnessReport:
    """Sample ``trials`` b-sets and ``per_b`` disjoint a-sets each; report absorbing fractions.

    Undetermined absorber checks (budget) count as failures.
    """
    if trials < 1:
        raise InvalidParameters("trials must be at least 1")
    params.check(F)
    rng = random.Random(seed)
    if params.a + params.b > H.n:
        return RichnessReport(Fraction(0), tuple(Fraction(0) for _ in range(trials)))
    fractions = []
    for _ in range(trials):
        B = rng.sample(range(H.n), params.b)
        rest = [v for v in range(H.n) if v not in B]
        good = sum(bool(is_absorber(H, F, rng.sample(rest, params.a), B)) for _ in range(per_b))
        fractions.append(Fraction(good, per_b))
    return RichnessReport(sum(fractions, Fraction(0)) / trials, tuple(fractions))


@dataclass
class AbsorbingFamily:
    """Disjoint absorbers whose union ``vertices`` can swallow small leftovers."""

    H: KGraph
    F: KGraph
    params: AbsorberParams
    absorbers: list[tuple[int, ...]]
    omega_achieved: Fraction = Fraction(0)
    budget: int = 200_000
    _absorbs: dict = field(default_factory=dict, repr=False)

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(v for A in self.absorbers for v in A))

    def __iter__(self):
        yield self.vertices
        yield self.omega_achieved

    def _pack(self, S: frozenset[int]) -> Packing | None:
        if S not in self._absorbs:
            try:
                self._absorbs[S] = exact_perfect_packing(self.H, self.F, self.budget, within=S)
            except BudgetExceeded:
                self._absorbs[S] = None
        return self._absorbs[S]

    def absorb(self, C: Iterable[int], seed: int = 0, tries: int = 8) -> Packing | None:
        """A perfect packing of H[vertices ∪ C], or None if no split of C could be matched.

        C is cut into b-sets, each matched to a distinct absorber that absorbs
        it; unmatched absorbers are packed on their own.
        """
        C = sorted(set(C))
        b = self.params.b
        if set(C) & set(self.vertices):
            raise InvalidParameters("C must avoid the absorbers")
        if len(C) % b:
            return None
        rng = random.Random(seed)
        chunks_needed = len(C) // b
        if chunks_needed > len(self.absorbers):
            return None
        for attempt in range(tries):
            order = list(C)
            if attempt:
                rng.shuffle(order)
            chunks = [frozenset(order[i : i + b]) for i in range(0, len(order), b)]
            match = _match(chunks, self.absorbers, lambda ch, A: self._pack(frozenset(A) | ch) is not None)
            if match is None:
                continue
            copies = []
            for i, A in enumerate(self.absorbers):
                extra = match.get(i, frozenset())
                P = self._pack(frozenset(A) | extra)
                if P is None:
                    break
                copies.extend(P.copies)
            else:
                return Packing(tuple(copies))
        return None


def _match(chunks, absorbers, ok) -> dict[int, frozenset[int]] | None:
    """Kuhn's augmenting-path matching of every chunk to a distinct absorber."""
    owner: dict[int, int] = {}
    edges = [[i for i, A in enumerate(absorbers) if ok(ch, A)] for ch in chunks]

    def augment(c, seen):
        for i in edges[c]:
            if i in seen:
                continue
            seen.add(i)
            if i not in owner or augment(owner[i], seen):
                owner[i] = c
                return True
        return False

    for c in range(len(chunks)):
        if not augment(c, set()):
            return None
    return {i: chunks[c] for i, c in owner.items()}


def build_absorbing_family(
    H: KGraph,
    F: KGraph,
    params: AbsorberParams | None = None,
    seed: int = 0,
    *,
    target: int | None = None,
    candidates: int = 200,
    validation: int = 8,
    budget: int = 200_000,
) -> AbsorbingFamily:
    """Pick pairwise-disjoint absorbers by seeded sampling.

    A candidate a-set, drawn from unused vertices (alternately uniformly and
    from grid embeddings around a random b-set), is kept when H[A] packs and
    it absorbs at least ``epsilon`` of ``validation`` sampled b-sets. The
    family aims for ``ceil(omega * n / b)`` members (at least one).
    ``omega_achieved`` is the largest tested |C|/n that the family absorbed.
    Raises ``InsufficientAbsorbers`` when the target is not reached.
    """
    params = params or AbsorberParams.for_graph(F)
    params.check(F)
    n, a, b = H.n, params.a, params.b
    want = target if target is not None else max(1, ceil(params.omega * n / b))
    rng = random.Random(seed)
    family = AbsorbingFamily(H, F, params, [], budget=budget)
    used: set[int] = set()
    for attempt in range(candidates):
        if len(family.absorbers) >= want:
            break
        free = [v for v in range(n) if v not in used]
        if len(free) < a + b:
            break
        if attempt % 2 and a == F.n * (F.n - 1) and b == F.n:
            B = rng.sample(free, b)
            found = find_absorbers(H, F, B, seed=rng.randrange(2**32))
            found = [A for A in found if not used.intersection(A)]
            if not found:
                continue
            A = found[0]
        else:
            A = tuple(sorted(rng.sample(free, a)))
        if family._pack(frozenset(A)) is None:
            continue
        rest = [v for v in free if v not in A]
        hits = sum(
            family._pack(frozenset(A) | frozenset(rng.sample(rest, b))) is not None for _ in range(validation)
        )
        if Fraction(hits, validation) >= params.epsilon:
            family.absorbers.append(A)
            used.update(A)
    if len(family.absorbers) < want:
        raise InsufficientAbsorbers(f"found {len(family.absorbers)} of {want} absorbers after {candidates} candidates")
    outside = [v for v in range(n) if v not in used]
    best = 0
    for size in range(b, b * len(family.absorbers) + 1, b):
        if size > len(outside):
            break
        if family.absorb(rng.sample(outside, size), seed=rng.randrange(2**32)) is None:
            break
        best = size
    family.omega_achieved = Fraction(best, n) if n else Fraction(0)
    return family


@dataclass(frozen=True)
class PackReport:
    packing: Packing | None
    route: str
    diagnostics: dict = field(default_factory=dict)


def absorb_pack(
    H: KGraph,
    F: KGraph,
    params: AbsorberParams | None = None,
    seed: int = 0,
    budget: int = 200_000,
    *,
    fallback_threshold: int = 16,
) -> PackReport:
    """Absorbing-method pipeline; hosts with at most ``fallback_threshold`` vertices go straight to the exact solver.

    The result's packing always passes ``is_perfect_packing``; failures raise
    ``PackingFailure`` naming the stage.
    """
    n, f = H.n, F.n
    if f == 0 or n % f:
        raise PackingFailure("divisibility", f"v(F)={f} does not divide v(H)={n}")
    if n <= fallback_threshold:
        P = exact_perfect_packing(H, F, budget)
        if P is not None and not is_perfect_packing(H, F, P):
            raise AssertionError("exact solver returned an invalid packing")
        return PackReport(P, "exact", {"n": n})
    params = params or AbsorberParams.for_graph(F)
    try:
        family = build_absorbing_family(H, F, params, seed, budget=budget)
    except InsufficientAbsorbers as exc:
        raise PackingFailure("family", str(exc)) from exc
    A = set(family.vertices)
    diag = {"n": n, "absorber_vertices": len(A), "absorbers": len(family.absorbers),
            "omega_achieved": family.omega_achieved}
    rest = [v for v in range(n) if v not in A]
    greedy, leftover = greedy_packing(H, F, params.b, seed, within=rest)
    diag["leftover"] = len(leftover)
    if len(leftover) % params.b or len(leftover) > params.omega * n:
        raise PackingFailure("greedy", f"leftover of {len(leftover)} vertices exceeds omega*n or is not a multiple of b", diag)
    absorbed = family.absorb(leftover, seed=seed)
    if absorbed is None:
        absorbed = exact_perfect_packing(H, F, budget, within=A | set(leftover))
    if absorbed is None:
        raise PackingFailure("absorb", "absorbers could not take the leftover", diag)
    P = greedy + absorbed
    if not is_perfect_packing(H, F, P):
        raise PackingFailure("absorb", "assembled packing failed verification", diag)
    return PackReport(P, "pipeline", diag)
