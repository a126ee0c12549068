"""Adaptedness certificates, antichain implication and the grid graph.

A certificate is an edge ordering plus, for every edge, a labeling of its
vertices by 1..k. An edge may have an *anchor* vertex (the special vertex in
the (I,J) setting, or the pinned vertex it meets in the "adapted at" setting);
the anchor is implicitly labeled k and excluded, the rest is labeled 1..k-1
and checked against J instead of I.

The condition placed on edge E_i only involves its own labeling and the *set*
of edges before it, and it only gets harder as that set grows. So an ordering
exists iff one can repeatedly peel off some edge that is feasible with every
other remaining edge in front of it, and any feasible choice is as good as
another. ``find_certificate`` therefore peels greedily and is complete: a
``None`` result is a proof of nonexistence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BudgetExceeded, InvalidParameters, ParseError
from .hypercore import Edge, KGraph
from .layouts import Antichain

__all__ = [
    "AdaptednessCertificate",
    "MalformedCertificate",
    "verify_certificate",
    "find_certificate",
    "antichain_implies",
    "GridGraph",
    "grid_graph",
    "serialize_certificate",
    "parse_certificate",
]


class MalformedCertificate(InvalidParameters):
    pass


@dataclass(frozen=True)
class AdaptednessCertificate:
    """Witness for I-adapted, (I,J)-adapted or (I,J)-adapted-at-pins.

    ``labels[i]`` maps the non-anchor vertices of ``edge_order[i]`` to labels.
    In (I,J) mode ``special_vertex`` is set and ``plain`` holds the separate
    I-adapted witness the definition also demands.
    """

    edge_order: tuple[Edge, ...]
    labels: tuple[dict[int, int], ...]
    special_vertex: int | None = None
    pinned: tuple[int, ...] | None = None
    plain: "AdaptednessCertificate | None" = field(default=None)

    def anchor(self, edge: Edge) -> int | None:
        if self.pinned is not None:
            hits = [v for v in edge if v in self.pinned]
            return hits[0] if hits else None
        if self.special_vertex is not None and self.special_vertex in edge:
            return self.special_vertex
        return None

    @property
    def mode(self) -> str:
        if self.pinned is not None:
            return "adapted_at"
        if self.special_vertex is not None:
            return "ij_adapted"
        return "adapted"


def antichain_implies(A: Antichain, B: Antichain) -> bool:
    """True iff every member of B lies inside some member of A (so Disc(A) gives Disc(B))."""
    if A.ground != B.ground:
        raise InvalidParameters(f"ground mismatch: {A.ground} vs {B.ground}")
    return all(A.covers(b) for b in B.members)


def _family_for(anchor, A: Antichain, J: Antichain | None) -> Antichain:
    if anchor is None:
        return A
    if J is None:
        raise InvalidParameters("an edge has an anchor vertex but no J antichain was given")
    return J


def _check_order(F: KGraph, order: Sequence[Edge]) -> None:
    if sorted(tuple(sorted(e)) for e in order) != list(F.sorted_edges):
        raise MalformedCertificate("edge order is not a permutation of the edges of F")


def _check_ordering(F, A, J, cert: AdaptednessCertificate) -> bool:
    _check_order(F, cert.edge_order)
    if len(cert.labels) != len(cert.edge_order):
        raise MalformedCertificate("one labeling per edge is required")
    if cert.pinned is not None and len(set(cert.pinned)) != len(cert.pinned):
        raise MalformedCertificate("pinned vertices repeat")
    for i, edge in enumerate(cert.edge_order):
        anchor = cert.anchor(edge)
        rest = [v for v in edge if v != anchor]
        lab = cert.labels[i]
        if set(lab) != set(rest) or sorted(lab.values()) != list(range(1, len(rest) + 1)):
            raise MalformedCertificate(f"labeling of edge {edge} is not a bijection onto [{len(rest)}]")
    for i, edge in enumerate(cert.edge_order):
        if cert.pinned is not None and sum(v in cert.pinned for v in edge) > 1:
            return False
        anchor = cert.anchor(edge)
        family = _family_for(anchor, A, J)
        lab = cert.labels[i]
        for prior in cert.edge_order[:i]:
            shared = (set(edge) & set(prior)) - {anchor}
            if not family.covers(lab[v] for v in shared):
                return False
    return True


def verify_certificate(
    F: KGraph, A: Antichain, J: Antichain | None, cert: AdaptednessCertificate, *, same_order: bool = False
) -> bool:
    """Check a certificate. Structural problems raise ``MalformedCertificate``.

    ``same_order`` additionally requires an (I,J) certificate to use one
    ordering for both of its parts.
    """
    if A.ground != F.k:
        raise InvalidParameters(f"I must live on [{F.k}]")
    if J is not None and J.ground != F.k - 1:
        raise InvalidParameters(f"J must live on [{F.k - 1}]")
    if cert.mode == "ij_adapted":
        if cert.plain is None or cert.plain.mode != "adapted":
            raise MalformedCertificate("(I,J) certificate needs its plain I-adapted part")
        if not 0 <= cert.special_vertex < F.n:
            raise MalformedCertificate("special vertex out of range")
        if same_order and cert.plain.edge_order != cert.edge_order:
            return False
        return _check_ordering(F, A, None, cert.plain) and _check_ordering(F, A, J, cert)
    return _check_ordering(F, A, J, cert)


class _Peeler:
    def __init__(self, A: Antichain, J: Antichain | None, budget: int | None):
        self.A = A
        self.J = J
        self.budget = budget
        self.steps = 0
        self._memo: dict = {}

    def labeling(self, edge: Edge, anchor, others: Iterable[Edge]) -> dict[int, int] | None:
        """A labeling of ``edge`` compatible with every edge in ``others`` placed before it."""
        shared = frozenset(
            frozenset((set(edge) & set(o)) - {anchor}) for o in others
        ) - {frozenset()}
        key = (edge, anchor, shared)
        if key in self._memo:
            return self._memo[key]
        family = _family_for(anchor, self.A, self.J)
        rest = [v for v in edge if v != anchor]
        found = None
        for perm in itertools.permutations(range(1, len(rest) + 1)):
            self.steps += 1
            if self.budget is not None and self.steps > self.budget:
                raise BudgetExceeded(f"certificate search exceeded {self.budget} labelings", self.steps)
            lab = dict(zip(rest, perm))
            if all(family.covers(lab[v] for v in s) for s in shared):
                found = lab
                break
        self._memo[key] = found
        return found

    def peel(self, F: KGraph, anchor_of, also_plain: bool = False):
        """Returns (order, labels, plain_labels) or None.

        With ``also_plain`` every edge must in addition admit an unanchored
        labeling against the same earlier edges; ``plain_labels`` holds those.
        """
        remaining = list(F.sorted_edges)
        back_edges: list[Edge] = []
        back_labels: list[dict[int, int]] = []
        back_plain: list[dict[int, int]] = []
        while remaining:
            # prefer peeling edges that meet the rest least; any feasible edge is fine
            meets = {e: sum(bool(set(e) & set(o)) for o in remaining) for e in remaining}
            remaining.sort(key=lambda e: (meets[e], e))
            for e in remaining:
                others = [o for o in remaining if o != e]
                anchor = anchor_of(e)
                lab = self.labeling(e, anchor, others)
                plain = lab if anchor is None else None
                if lab is not None and also_plain and anchor is not None:
                    plain = self.labeling(e, None, others)
                    if plain is None:
                        lab = None
                if lab is not None:
                    break
            else:
                return None
            remaining.remove(e)
            back_edges.append(e)
            back_labels.append(lab)
            back_plain.append(plain)
        return tuple(reversed(back_edges)), tuple(reversed(back_labels)), tuple(reversed(back_plain))


def find_certificate(
    F: KGraph,
    A: Antichain,
    J: Antichain | None = None,
    pins: Sequence[int] | None = None,
    *,
    budget: int | None = 1_000_000,
    same_order: bool = False,
) -> AdaptednessCertificate | None:
    """Search for an adaptedness certificate.

    Modes: plain I-adapted (``J`` is None); (I,J)-adapted (``J`` given, no
    ``pins``); (I,J)-adapted at ``pins``. Returns None only when no
    certificate exists; raises ``BudgetExceeded`` if ``budget`` labelings
    were tried without a verdict.

    In (I,J) mode the I-adapted ordering and the special-vertex ordering are
    found independently. ``same_order=True`` asks for one ordering serving
    both, which is a stronger requirement.
    """
    if A.ground != F.k:
        raise InvalidParameters(f"I must live on [{F.k}], got ground {A.ground}")
    if J is not None and J.ground != F.k - 1:
        raise InvalidParameters(f"J must live on [{F.k - 1}], got ground {J.ground}")
    peeler = _Peeler(A, J, budget)

    if pins is not None:
        pins = tuple(pins)
        if any(not 0 <= s < F.n for s in pins) or len(set(pins)) != len(pins):
            raise InvalidParameters("pins must be distinct vertices of F")
        pinset = set(pins)
        if any(len(pinset.intersection(e)) > 1 for e in F.edges):
            return None

        def anchor_of(e):
            hits = [v for v in e if v in pinset]
            return hits[0] if hits else None

        found = peeler.peel(F, anchor_of)
        if found is None:
            return None
        return AdaptednessCertificate(found[0], found[1], pinned=pins)

    plain = peeler.peel(F, lambda e: None)
    if plain is None:
        return None
    plain_cert = AdaptednessCertificate(plain[0], plain[1])
    if J is None:
        return plain_cert
    # try vertices that lie on the most edges last; isolated vertices are trivially fine
    for x in sorted(range(F.n), key=lambda v: (sum(v in e for e in F.edges), v)):
        found = peeler.peel(F, lambda e, x=x: x if x in e else None, also_plain=same_order)
        if found is not None:
            if same_order:
                plain_cert = AdaptednessCertificate(found[0], found[2])
            return AdaptednessCertificate(found[0], found[1], special_vertex=x, plain=plain_cert)
    return None


# -- grid graph ----------------------------------------------------------------


@dataclass(frozen=True)
class GridGraph:
    """F' on f*f vertices; vertex ``i*f + j`` sits in row i, column j.

    ``copies`` lists placements of F (tuple indexed by F-vertex): first the f
    columns, then rows 1..f-1.
    """

    graph: KGraph
    zeroth_row: tuple[int, ...]
    copies: tuple[tuple[int, ...], ...]
    f: int

    @property
    def column_copies(self):
        return self.copies[: self.f]

    @property
    def row_copies(self):
        return self.copies[self.f :]

    def rows(self, start: int = 1) -> list[int]:
        """Vertices of rows ``start``..f-1."""
        return [i * self.f + j for i in range(start, self.f) for j in range(self.f)]

    def __iter__(self):
        yield self.graph
        yield self.zeroth_row


def grid_graph(F: KGraph, special: int = 0) -> GridGraph:
    """Each column induces F with row index i playing w_i, and each row i >= 1
    induces F with column index j playing w_j. w_0 is ``special``."""
    f = F.n
    if f < F.k or f == 0:
        raise InvalidParameters("grid graph needs v(F) >= k")
    if not 0 <= special < f:
        raise InvalidParameters("special vertex out of range")
    w = [special] + [v for v in range(f) if v != special]
    pos = {v: i for i, v in enumerate(w)}
    copies = []
    for j in range(f):
        copies.append(tuple(pos[v] * f + j for v in range(f)))
    for i in range(1, f):
        copies.append(tuple(i * f + pos[v] for v in range(f)))
    edges = {tuple(sorted(place[v] for v in e)) for place in copies for e in F.edges}
    zeroth = tuple(range(f))
    return GridGraph(KGraph(F.k, f * f, frozenset(edges)), zeroth, tuple(copies), f)


# -- text form ----------------------------------------------------------------


def _block(cert: AdaptednessCertificate, tag: str) -> list[str]:
    out = [f"{tag} {len(cert.edge_order)}"]
    for e, lab in zip(cert.edge_order, cert.labels):
        pairs = " ".join(f"{v}->{lab[v]}" for v in sorted(lab))
        out.append(f"{' '.join(map(str, e))} : {pairs}".rstrip())
    return out


def serialize_certificate(cert: AdaptednessCertificate) -> str:
    out = ["certificate v1", f"mode {cert.mode}"]
    out.append("special " + ("none" if cert.special_vertex is None else str(cert.special_vertex)))
    out.append("pinned " + ("none" if cert.pinned is None else " ".join(map(str, cert.pinned))))
    out += _block(cert, "edges")
    if cert.plain is not None:
        out += _block(cert.plain, "plain-edges")
    return "\n".join(out) + "\n"


def _parse_block(lines, tag):
    head = next(lines, "").split()
    if len(head) != 2 or head[0] != tag:
        raise ParseError(f"expected '{tag} m'")
    order, labels = [], []
    for _ in range(int(head[1])):
        line = next(lines, None)
        if line is None:
            raise ParseError(f"truncated {tag} block")
        verts, _, pairs = line.partition(":")
        order.append(tuple(int(t) for t in verts.split()))
        lab = {}
        for p in pairs.split():
            v, _, l = p.partition("->")
            lab[int(v)] = int(l)
        labels.append(lab)
    return tuple(order), tuple(labels)


def parse_certificate(text: str) -> AdaptednessCertificate:
    lines = iter([ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")])
    if next(lines, None) != "certificate v1":
        raise ParseError("missing 'certificate v1' header", 1)
    mode = next(lines, "").split()
    special = next(lines, "").split()
    pinned = next(lines, "").split()
    if mode[:1] != ["mode"] or special[:1] != ["special"] or pinned[:1] != ["pinned"]:
        raise ParseError("expected mode/special/pinned lines")
    sv = None if special[1] == "none" else int(special[1])
    pv = None if pinned[1:] == ["none"] else tuple(int(t) for t in pinned[1:])
    order, labels = _parse_block(lines, "edges")
    plain = None
    if mode[1] == "ij_adapted":
        po, pl = _parse_block(lines, "plain-edges")
        plain = AdaptednessCertificate(po, pl)
    return AdaptednessCertificate(order, labels, special_vertex=sv, pinned=pv, plain=plain)
