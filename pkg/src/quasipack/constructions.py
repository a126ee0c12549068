"""Seeded generators: A_n^(k), G^(k)(n,p), the link-replacement graph, zero-color layouts.

Randomness comes from ``subset_draw`` (generator "qp-blake2b-v1"): the 64-bit
value for a (stream, seed, subset) triple is the big-endian integer of the
8-byte BLAKE2b digest of the ASCII string ``"{stream}|{seed}|{v1,v2,...}"``.
Every subset's draw is independent of generation order, so output is
bit-identical across platforms and parallel evaluation.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InvalidParameters, ParseError
from .hypercore import KGraph, link
from .layouts import Antichain, Layout

GENERATOR = "qp-blake2b-v1"

# two-colour and three-colour graph Ramsey numbers for triangles; labels only
RAMSEY_TRIANGLE = {2: 6, 3: 17}

__all__ = [
    "GENERATOR",
    "RAMSEY_TRIANGLE",
    "Coloring",
    "subset_draw",
    "gen_A",
    "gen_gnp",
    "gen_prop19",
    "zero_color_layout",
    "color_sum",
    "parse_coloring",
    "serialize_coloring",
]


def subset_draw(stream: str, seed: int, subset) -> int:
    msg = f"{stream}|{seed}|{','.join(map(str, subset))}".encode("ascii")
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "big")


def _bernoulli(stream: str, seed: int, subset, p: Fraction) -> bool:
    # exact comparison u < p with u = draw / 2^64
    return subset_draw(stream, seed, subset) * p.denominator < p.numerator << 64


@dataclass(frozen=True)
class Coloring:
    k: int
    n: int
    colors: Mapping[tuple[int, ...], int]

    def __post_init__(self):
        expected = sum(1 for _ in itertools.combinations(range(self.n), self.k - 1))
        if len(self.colors) != expected:
            raise InvalidParameters(f"coloring must cover all {expected} ({self.k - 1})-sets")
        for T, c in self.colors.items():
            if len(T) != self.k - 1 or not 0 <= c < self.k:
                raise InvalidParameters(f"bad colour entry {T} -> {c}")

    def __getitem__(self, T) -> int:
        return self.colors[tuple(sorted(T))]

    def color_class(self, c: int) -> KGraph:
        return KGraph(self.k - 1, self.n, frozenset(T for T, col in self.colors.items() if col == c))


def color_sum(coloring: Coloring, E) -> int:
    """Sum mod k of the colours of the (k-1)-subsets of E."""
    return sum(coloring[T] for T in itertools.combinations(sorted(E), coloring.k - 1)) % coloring.k


def _draw_coloring(k: int, n: int, seed: int, stream: str = "A-color") -> Coloring:
    colors = {T: subset_draw(stream, seed, T) % k for T in itertools.combinations(range(n), k - 1)}
    return Coloring(k, n, colors)


def gen_A(k: int, n: int, seed: int) -> tuple[KGraph, Coloring]:
    """A_n^(k): colour (k-1)-sets uniformly by 0..k-1; E is an edge iff its colour sum is nonzero mod k."""
    if k < 2 or n < k:
        raise InvalidParameters(f"gen_A needs k >= 2 and n >= k, got k={k} n={n}")
    coloring = _draw_coloring(k, n, seed)
    col = coloring.colors
    # combinations of a sorted tuple come out sorted, so direct lookups are safe
    edges = frozenset(
        E
        for E in itertools.combinations(range(n), k)
        if sum(col[T] for T in itertools.combinations(E, k - 1)) % k
    )
    return KGraph(k, n, edges), coloring


def gen_gnp(k: int, n: int, p, seed: int) -> KGraph:
    p = Fraction(p)
    if k < 1 or n < 0:
        raise InvalidParameters(f"gen_gnp needs k >= 1 and n >= 0, got k={k} n={n}")
    if not 0 <= p <= 1:
        raise InvalidParameters(f"p must lie in [0, 1], got {p}")
    edges = frozenset(
        E for E in itertools.combinations(range(n), k) if _bernoulli("gnp", seed, E, p)
    )
    return KGraph(k, n, edges)


def gen_prop19(k: int, n: int, seed: int, p=None, special: int = 0) -> tuple[KGraph, int]:
    """G^(k)(n,p) whose vertex ``special`` gets the link A^(k-1) on the other n-1 vertices.

    The link is exactly ``gen_A(k - 1, n - 1, seed)`` under the order-preserving
    relabeling of V - {special}; edges avoiding ``special`` are those of
    ``gen_gnp(k, n, p, seed)``.
    """
    if k < 3 or n < k:
        raise InvalidParameters(f"gen_prop19 needs k >= 3 and n >= k, got k={k} n={n}")
    if not 0 <= special < n:
        raise InvalidParameters("special vertex out of range")
    p = Fraction(k - 1, k) if p is None else Fraction(p)
    base = gen_gnp(k, n, p, seed)
    link_graph, _ = gen_A(k - 1, n - 1, seed)
    labels = link(base, special).labels
    kept = {e for e in base.edges if special not in e}
    kept |= {tuple(sorted((special,) + tuple(labels[v] for v in S))) for S in link_graph.edges}
    return KGraph(k, n, frozenset(kept)), special


def zero_color_layout(coloring: Coloring) -> Layout:
    """Layout over all (k-1)-subsets of [k] with the colour-0 class in every coordinate."""
    Z = coloring.color_class(0).edges
    A = Antichain.uniform(coloring.k, coloring.k - 1)
    return Layout(A, coloring.n, {m: Z for m in A.members})


def serialize_coloring(c: Coloring) -> str:
    out = [f"coloring {c.k} {c.n}"]
    for T in sorted(c.colors):
        out.append(" ".join(map(str, T + (c.colors[T],))))
    return "\n".join(out) + "\n"


def parse_coloring(text: str) -> Coloring:
    rows = [(i, ln.split()) for i, ln in enumerate(text.splitlines(), 1) if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0][1]) != 3 or rows[0][1][0] != "coloring":
        raise ParseError("header must be 'coloring k n'", rows[0][0] if rows else None)
    k, n = int(rows[0][1][1]), int(rows[0][1][2])
    colors = {}
    for lineno, toks in rows[1:]:
        if len(toks) != k:
            raise ParseError(f"expected {k - 1} vertices and a colour", lineno)
        vals = [int(t) for t in toks]
        T = tuple(vals[:-1])
        if list(T) != sorted(set(T)) or (T and (T[0] < 0 or T[-1] >= n)):
            raise ParseError("subset must be ascending, distinct and in range", lineno)
        if T in colors:
            raise ParseError(f"subset {T} coloured twice", lineno)
        colors[T] = vals[-1]
    try:
        return Coloring(k, n, colors)
    except InvalidParameters as exc:
        raise ParseError(str(exc)) from None
