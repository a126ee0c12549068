"""k-uniform hypergraphs on dense vertex sets 0..n-1.

Edges are sorted integer tuples. Links and induced subgraphs are relabeled
order-preservingly; the relabeling is returned next to the graph so callers
can map back to the original vertices.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from math import comb
from typing import Iterable, Iterator, NamedTuple

from .errors import InvalidParameters, ParseError

Edge = tuple[int, ...]

__all__ = [
    "Edge",
    "KGraph",
    "Relabeled",
    "complete",
    "empty",
    "link",
    "degree",
    "min_degree",
    "induced",
    "parse",
    "serialize",
    "read",
    "write",
]


@dataclass(frozen=True)
class KGraph:
    """A k-uniform hypergraph with vertex set ``range(n)``.

    ``edges`` accepts any iterable of vertex collections; each is stored as
    an ascending tuple. Duplicates, wrong sizes and out-of-range vertices
    raise ``InvalidParameters``.
    """

    k: int
    n: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 0 or self.n < 0:
            raise InvalidParameters(f"k and n must be non-negative, got k={self.k} n={self.n}")
        seen = set()
        for raw in self.edges:
            e = tuple(sorted(raw))
            if len(e) != self.k or len(set(e)) != self.k:
                raise InvalidParameters(f"edge {raw!r} does not have {self.k} distinct vertices")
            if e and (e[0] < 0 or e[-1] >= self.n):
                raise InvalidParameters(f"edge {raw!r} leaves vertex range [0, {self.n})")
            if e in seen:
                raise InvalidParameters(f"duplicate edge {e}")
            seen.add(e)
        object.__setattr__(self, "edges", frozenset(seen))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, vertices) -> bool:
        return tuple(sorted(vertices)) in self.edges

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.sorted_edges)

    @property
    def vertices(self) -> range:
        return range(self.n)

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def extensions(self) -> "ExtensionIndex":
        """Map each proper sub-tuple S of an edge to the vertices w with S+w inside an edge.

        Used as the forward-checking index by every backtracking search.
        """
        return ExtensionIndex(self)

    def density(self) -> float:
        total = comb(self.n, self.k)
        return len(self.edges) / total if total else 0.0

    def relabel(self, mapping: dict[int, int], n: int) -> "KGraph":
        return KGraph(self.k, n, frozenset(tuple(sorted(mapping[v] for v in e)) for e in self.edges))


class ExtensionIndex:
    """Read-only mapping behind ``KGraph.extensions``.

    The (k-1)-level is built eagerly; smaller sub-tuples are resolved on
    first use from per-vertex incidence lists and memoized.
    """

    def __init__(self, H: KGraph):
        self.k = H.k
        top: dict[Edge, list[int]] = defaultdict(list)
        incidence: dict[int, list[Edge]] = defaultdict(list)
        for e in H.edges:
            for i, v in enumerate(e):
                top[e[:i] + e[i + 1 :]].append(v)
                incidence[v].append(e)
        self._top = {S: frozenset(vs) for S, vs in top.items()}
        self._incidence = incidence
        self._memo: dict[Edge, frozenset[int] | None] = {}

    def _lookup(self, S: Edge) -> frozenset[int] | None:
        if len(S) == self.k - 1:
            return self._top.get(S)
        if len(S) >= self.k:
            return None
        if S not in self._memo:
            if S:
                need = set(S)
                pool = (e for e in self._incidence.get(S[0], ()) if need.issubset(e))
            else:
                pool = (e for es in self._incidence.values() for e in es)
            found = frozenset(v for e in pool for v in e if v not in S)
            self._memo[S] = found or None
        return self._memo[S]

    def get(self, S: Edge, default=None):
        found = self._lookup(tuple(S))
        return default if found is None else found

    def __getitem__(self, S: Edge) -> frozenset[int]:
        found = self._lookup(tuple(S))
        if found is None:
            raise KeyError(S)
        return found

    def __contains__(self, S) -> bool:
        return self._lookup(tuple(S)) is not None


class Relabeled(NamedTuple):
    """A derived graph plus ``labels[i]`` = original vertex of new vertex ``i``."""

    graph: KGraph
    labels: tuple[int, ...]

    def to_original(self, v: int) -> int:
        return self.labels[v]

    def from_original(self, v: int) -> int:
        return self.labels.index(v)


def complete(r: int, k: int) -> KGraph:
    if k < 1 or k > r:
        raise InvalidParameters(f"complete graph needs 1 <= k <= r, got r={r} k={k}")
    return KGraph(k, r, frozenset(itertools.combinations(range(r), k)))


def empty(n: int, k: int) -> KGraph:
    return KGraph(k, n)


def _check_vertex(H: KGraph, x: int) -> None:
    if not 0 <= x < H.n:
        raise InvalidParameters(f"vertex {x} out of range [0, {H.n})")


def link(H: KGraph, x: int) -> Relabeled:
    """The (k-1)-graph N_H(x) on V(H) - {x}, relabeled by shifting vertices above x down by one."""
    _check_vertex(H, x)
    if H.k < 1:
        raise InvalidParameters("link needs k >= 1")
    labels = tuple(v for v in range(H.n) if v != x)
    shift = {v: (v if v < x else v - 1) for v in labels}
    edges = frozenset(tuple(shift[v] for v in e if v != x) for e in H.edges if x in e)
    return Relabeled(KGraph(H.k - 1, H.n - 1, edges), labels)


def degree(H: KGraph, S: Iterable[int]) -> int:
    """d_H(S): number of edges containing the vertex set S."""
    S = tuple(sorted(set(S)))
    if len(S) >= H.k:
        raise InvalidParameters(f"degree set has size {len(S)} but must be smaller than k={H.k}")
    for v in S:
        _check_vertex(H, v)
    if not S:
        return len(H.edges)
    s = set(S)
    return sum(1 for e in H.edges if s.issubset(e))


def min_degree(H: KGraph, ell: int) -> int:
    """Minimum of d_H(S) over all ell-subsets S of V(H)."""
    if not 1 <= ell <= H.k - 1:
        raise InvalidParameters(f"ell must lie in [1, k-1], got {ell}")
    if H.n < ell:
        return 0
    counts = dict.fromkeys(itertools.combinations(range(H.n), ell), 0)
    for e in H.edges:
        for sub in itertools.combinations(e, ell):
            counts[sub] += 1
    return min(counts.values())


def induced(H: KGraph, W: Iterable[int]) -> Relabeled:
    labels = tuple(sorted(set(W)))
    for v in labels:
        _check_vertex(H, v)
    index = {v: i for i, v in enumerate(labels)}
    edges = frozenset(tuple(index[v] for v in e) for e in H.edges if all(v in index for v in e))
    return Relabeled(KGraph(H.k, len(labels), edges), labels)


# -- text format v1 ---------------------------------------------------------


def _content_lines(lines: Iterable[str]) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield lineno, stripped.split()


def parse_lines(lines: Iterator[tuple[int, list[str]]]) -> KGraph:
    """Consume one graph (header plus m edge lines) from a token-line stream."""
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise ParseError("missing 'k n m' header") from None
    if len(head) != 3:
        raise ParseError(f"header must be 'k n m', got {' '.join(head)!r}", lineno)
    try:
        k, n, m = (int(t) for t in head)
    except ValueError:
        raise ParseError(f"non-integer header {' '.join(head)!r}", lineno) from None
    if k < 0 or n < 0 or m < 0:
        raise ParseError("negative value in header", lineno)
    edges: set[Edge] = set()
    for _ in range(m):
        try:
            lineno, toks = next(lines)
        except StopIteration:
            raise ParseError(f"expected {m} edge lines, got {len(edges)}") from None
        try:
            e = tuple(int(t) for t in toks)
        except ValueError:
            raise ParseError(f"non-integer vertex in {' '.join(toks)!r}", lineno) from None
        if len(e) != k:
            raise ParseError(f"edge has {len(e)} vertices, expected {k}", lineno)
        if list(e) != sorted(set(e)):
            raise ParseError("edge vertices must be distinct and ascending", lineno)
        if e and (e[0] < 0 or e[-1] >= n):
            raise ParseError(f"vertex out of range [0, {n})", lineno)
        if e in edges:
            raise ParseError(f"duplicate edge {' '.join(toks)}", lineno)
        edges.add(e)
    return KGraph(k, n, frozenset(edges))


def parse(text: str) -> KGraph:
    lines = _content_lines(text.splitlines())
    H = parse_lines(lines)
    extra = next(lines, None)
    if extra is not None:
        raise ParseError("trailing content after last edge", extra[0])
    return H


def serialize(H: KGraph) -> str:
    out = [f"{H.k} {H.n} {len(H.edges)}"]
    out.extend(" ".join(map(str, e)) for e in H.sorted_edges)
    return "\n".join(out) + "\n"


def read(path) -> KGraph:
    with open(path, encoding="ascii") as fh:
        return parse(fh.read())


def write(H: KGraph, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize(H))
