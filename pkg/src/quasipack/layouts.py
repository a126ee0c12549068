"""Antichains over [g], I-layouts, and their ordered clique sets K_k(layout).

Antichain members are 1-based position sets, stored as ascending tuples.
A layout assigns each member I an |I|-uniform edge set on a shared vertex
set. The empty member carries a flag: the 0-uniform graph either contains the
empty edge (no constraint) or not (the clique set is empty).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from ._search import Constraint, InjectiveSearch
from .errors import InvalidParameters, ParseError
from .hypercore import KGraph, _content_lines, parse_lines, serialize

Member = tuple[int, ...]

__all__ = [
    "Antichain",
    "Layout",
    "is_full",
    "count_cliques",
    "enumerate_cliques",
    "intersect_count",
    "falling_factorial",
    "parse_antichain",
    "format_antichain",
    "parse_layout",
    "serialize_layout",
]


def falling_factorial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return max(out, 0) if k <= n else 0


@dataclass(frozen=True)
class Antichain:
    ground: int
    members: tuple[Member, ...]

    def __post_init__(self):
        if self.ground < 0:
            raise InvalidParameters("ground size must be non-negative")
        mem = set()
        for raw in self.members:
            m = tuple(sorted(set(raw)))
            if len(m) != len(tuple(raw)):
                raise InvalidParameters(f"member {raw!r} repeats a position")
            if any(not 1 <= i <= self.ground for i in m):
                raise InvalidParameters(f"member {raw!r} leaves [1, {self.ground}]")
            mem.add(m)
        if not mem:
            raise InvalidParameters("an antichain needs at least one member")
        for a in mem:
            for b in mem:
                if a != b and set(a) <= set(b):
                    raise InvalidParameters(f"{set(a) or '{}'} is contained in {set(b)}; not an antichain")
        object.__setattr__(self, "members", tuple(sorted(mem, key=lambda m: (len(m), m))))

    @classmethod
    def of(cls, ground: int, *members: Iterable[int]) -> "Antichain":
        return cls(ground, tuple(tuple(m) for m in members))

    @classmethod
    def uniform(cls, ground: int, size: int) -> "Antichain":
        """All ``size``-subsets of [ground], e.g. the (k-1)-level antichain."""
        return cls(ground, tuple(itertools.combinations(range(1, ground + 1), size)))

    @classmethod
    def singletons(cls, ground: int) -> "Antichain":
        return cls.uniform(ground, 1)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def covers(self, labels: Iterable[int]) -> bool:
        """True iff the label set lies inside some member."""
        s = set(labels)
        return any(s.issubset(m) for m in self.members)

    def __str__(self):
        return format_antichain(self)


def is_full(A: Antichain) -> bool:
    if len(A.members) < 2:
        return False
    covered = set().union(*map(set, A.members))
    return covered >= set(range(1, A.ground + 1))


def parse_antichain(text: str, ground: int) -> Antichain:
    """Parse the flag syntax ``"1,2|3"``; ``"e"`` is the empty member."""
    members = []
    for chunk in text.strip().split("|"):
        chunk = chunk.strip()
        if chunk in ("e", ""):
            members.append(())
            continue
        try:
            members.append(tuple(int(t) for t in chunk.split(",")))
        except ValueError:
            raise ParseError(f"bad antichain member {chunk!r}") from None
    return Antichain(ground, tuple(members))


def format_antichain(A: Antichain) -> str:
    return "|".join(",".join(map(str, m)) if m else "e" for m in A.members)


@dataclass(frozen=True)
class Layout:
    """An I-layout on ``n`` vertices.

    ``edges[I]`` is the edge set of lambda_I; for the empty member it is
    either ``{()}`` (present) or empty (absent).
    """

    antichain: Antichain
    n: int
    edges: Mapping[Member, frozenset[tuple[int, ...]]]
    _graphs: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        norm, graphs = {}, {}
        for m in self.antichain.members:
            if m not in self.edges:
                raise InvalidParameters(f"layout has no graph for member {m}")
            # KGraph does the validation for us; keep it for its search index
            graphs[m] = KGraph(len(m), self.n, frozenset(self.edges[m]))
            norm[m] = graphs[m].edges
        extra = set(self.edges) - set(norm)
        if extra:
            raise InvalidParameters(f"layout assigns graphs to non-members {sorted(extra)}")
        object.__setattr__(self, "edges", norm)
        object.__setattr__(self, "_graphs", graphs)

    @property
    def k(self) -> int:
        return self.antichain.ground

    @classmethod
    def from_graphs(cls, antichain: Antichain, graphs: Mapping[Member, "KGraph | bool"]) -> "Layout":
        edges = {}
        n = None
        for m in antichain.members:
            g = graphs[tuple(m)]
            if isinstance(g, bool):
                edges[tuple(m)] = frozenset({()}) if g else frozenset()
                continue
            if g.k != len(m):
                raise InvalidParameters(f"member {m} needs a {len(m)}-graph, got k={g.k}")
            if n is not None and g.n != n:
                raise InvalidParameters("layout graphs must share one vertex set")
            n = g.n
            edges[tuple(m)] = g.edges
        if n is None:
            raise InvalidParameters("cannot infer n from a layout of flags only; use Layout(...) directly")
        return cls(antichain, n, edges)

    def graph(self, member: Iterable[int]) -> KGraph:
        return self._graphs[tuple(sorted(member))]

    def toggled(self, member: Member, edge: tuple[int, ...]) -> "Layout":
        cur = self.edges[member]
        new = cur - {edge} if edge in cur else cur | {edge}
        return Layout(self.antichain, self.n, {**self.edges, member: new})


def _constraints(L: Layout, H: KGraph | None = None) -> list[Constraint] | None:
    """Member constraints over coordinates 0..k-1; None if the empty member is absent."""
    cons = []
    for m in L.antichain.members:
        if not m:
            if () not in L.edges[m]:
                return None
            continue
        cons.append(Constraint(tuple(i - 1 for i in m), L.graph(m)))
    if H is not None:
        cons.append(Constraint(tuple(range(L.k)), H))
    return cons


def _greedy_order(k: int, cons: list[Constraint]) -> list[int]:
    # coordinates of the sparsest graphs first
    order: list[int] = []
    for c in sorted(cons, key=lambda c: (len(c.graph.edges), c.scope)):
        order.extend(v for v in c.scope if v not in order)
    order.extend(v for v in range(k) if v not in order)
    return order


def _search(L: Layout, H: KGraph | None, fixed=None, natural=False) -> InjectiveSearch | None:
    if H is not None and (H.n != L.n or H.k != L.k):
        raise InvalidParameters("host graph and layout disagree on k or n")
    cons = _constraints(L, H)
    if cons is None or L.n < L.k:
        return None
    order = list(range(L.k)) if natural else _greedy_order(L.k, cons)
    if fixed:
        order = list(fixed) + [v for v in order if v not in fixed]
    return InjectiveSearch(L.k, L.n, cons, fixed=fixed, order=order)


def count_cliques(L: Layout, *, fixed: Mapping[int, int] | None = None) -> int:
    """|K_k(L)|: ordered tuples of distinct vertices hitting every lambda_I.

    ``fixed`` pins 0-based coordinates to vertices (used for incremental updates).
    """
    s = _search(L, None, fixed)
    return 0 if s is None else s.count()


def intersect_count(H: KGraph, L: Layout, *, fixed: Mapping[int, int] | None = None) -> int:
    """|H ∩ K_k(L)|: clique tuples whose underlying set is an edge of H."""
    s = _search(L, H, fixed)
    return 0 if s is None else s.count()


def enumerate_cliques(L: Layout) -> Iterator[tuple[int, ...]]:
    """Yield K_k(L) in lexicographic order."""
    s = _search(L, None, natural=True)
    if s is not None:
        yield from s.solutions()


# -- layout text format -------------------------------------------------------

_MEMBER_RE = re.compile(r"^I:\s*(.*)$")


def serialize_layout(L: Layout) -> str:
    out = [f"layout {L.k} {L.n}"]
    for m in L.antichain.members:
        if not m:
            out.append("I: empty " + ("present" if () in L.edges[m] else "absent"))
            continue
        out.append("I: " + ",".join(map(str, m)))
        out.append(serialize(L.graph(m)).rstrip("\n"))
    return "\n".join(out) + "\n"


def parse_layout(text: str) -> Layout:
    lines = _content_lines(text.splitlines())
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise ParseError("missing 'layout k n' header") from None
    if len(head) != 3 or head[0] != "layout":
        raise ParseError("header must be 'layout k n'", lineno)
    try:
        k, n = int(head[1]), int(head[2])
    except ValueError:
        raise ParseError("non-integer layout header", lineno) from None
    members: list[Member] = []
    edges: dict[Member, frozenset] = {}
    for lineno, toks in lines:
        match = _MEMBER_RE.match(" ".join(toks))
        if not match:
            raise ParseError(f"expected 'I: ...' block, got {' '.join(toks)!r}", lineno)
        body = match.group(1).split()
        if body and body[0] == "empty":
            if len(body) != 2 or body[1] not in ("present", "absent"):
                raise ParseError("empty member needs 'present' or 'absent'", lineno)
            members.append(())
            edges[()] = frozenset({()}) if body[1] == "present" else frozenset()
            continue
        try:
            m = tuple(sorted(int(t) for t in "".join(body).split(",")))
        except ValueError:
            raise ParseError(f"bad member {match.group(1)!r}", lineno) from None
        g = parse_lines(lines)
        if g.k != len(m) or g.n != n:
            raise ParseError(f"graph for member {m} must be a {len(m)}-graph on {n} vertices", lineno)
        if m in edges:
            raise ParseError(f"member {m} listed twice", lineno)
        members.append(m)
        edges[m] = g.edges
    try:
        return Layout(Antichain(k, tuple(members)), n, edges)
    except InvalidParameters as exc:
        raise ParseError(str(exc)) from None
