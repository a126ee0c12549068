import itertools
import random

import pytest

from quasipack.adapted import (
    AdaptednessCertificate,
    MalformedCertificate,
    antichain_implies,
    find_certificate,
    grid_graph,
    parse_certificate,
    serialize_certificate,
    verify_certificate,
)
from quasipack.errors import BudgetExceeded, InvalidParameters
from quasipack.hypercore import KGraph, complete, induced
from quasipack.layouts import Antichain

import oracles

C = KGraph(3, 6, {(0, 1, 2), (1, 2, 3), (3, 4, 5), (0, 4, 5)})
I12_3 = Antichain.of(3, (1, 2), (3,))
SINGLES = Antichain.singletons(3)
PAIRS = Antichain.uniform(3, 2)
J_EMPTY = Antichain.of(2, ())
J_SINGLES = Antichain.singletons(2)


def small_graphs(rng, count, n=6, max_edges=4):
    all_e = list(itertools.combinations(range(n), 3))
    for _ in range(count):
        yield KGraph(3, n, frozenset(rng.sample(all_e, rng.randint(0, max_edges))))


def test_paper_cycle_is_ij_adapted():
    cert = find_certificate(C, I12_3, J_EMPTY)
    assert cert is not None and cert.mode == "ij_adapted"
    assert verify_certificate(C, I12_3, J_EMPTY, cert)
    assert cert.plain is not None and verify_certificate(C, I12_3, None, cert.plain)


def test_k4_not_singleton_adapted():
    assert find_certificate(complete(4, 3), SINGLES) is None
    assert find_certificate(complete(4, 3), PAIRS) is not None


def test_single_edge_always_adapted():
    F = KGraph(3, 3, {(0, 1, 2)})
    for A in (SINGLES, I12_3, PAIRS, Antichain.of(3, ())):
        assert find_certificate(F, A) is not None


@pytest.mark.parametrize("A", [SINGLES, I12_3, PAIRS], ids=str)
def test_plain_mode_matches_oracle(A):
    rng = random.Random(11)
    for F in small_graphs(rng, 150):
        cert = find_certificate(F, A)
        assert (cert is not None) == oracles.adapted(F, A)
        if cert is not None:
            assert verify_certificate(F, A, None, cert)


@pytest.mark.parametrize("J", [J_EMPTY, J_SINGLES], ids=str)
def test_ij_mode_matches_oracle(J):
    rng = random.Random(12)
    for F in small_graphs(rng, 120):
        for A in (SINGLES, I12_3):
            cert = find_certificate(F, A, J)
            assert (cert is not None) == oracles.adapted(F, A, J)
            if cert is not None:
                assert verify_certificate(F, A, J, cert)


def test_shared_ordering_matches_oracle():
    rng = random.Random(15)
    for F in small_graphs(rng, 120):
        for A, J in ((SINGLES, J_EMPTY), (I12_3, J_EMPTY), (SINGLES, J_SINGLES)):
            cert = find_certificate(F, A, J, same_order=True)
            assert (cert is not None) == oracles.adapted(F, A, J, same_order=True)
            if cert is not None:
                assert cert.plain.edge_order == cert.edge_order
                assert verify_certificate(F, A, J, cert, same_order=True)
                # the shared reading is the stronger one
                assert find_certificate(F, A, J) is not None


def test_paper_cycle_with_shared_ordering():
    cert = find_certificate(C, I12_3, J_EMPTY, same_order=True)
    assert cert is not None and verify_certificate(C, I12_3, J_EMPTY, cert, same_order=True)


def test_pinned_mode_matches_oracle():
    rng = random.Random(13)
    for F in small_graphs(rng, 120):
        pins = rng.sample(range(6), rng.randint(1, 3))
        for A, J in ((PAIRS, J_SINGLES), (I12_3, J_EMPTY)):
            cert = find_certificate(F, A, J, pins)
            assert (cert is not None) == oracles.adapted(F, A, J, pins)
            if cert is not None:
                assert cert.mode == "adapted_at"
                assert verify_certificate(F, A, J, cert)


def test_factored_oracle_agrees_with_full_enumeration():
    rng = random.Random(14)
    for F in small_graphs(rng, 60, max_edges=3):
        for A in (SINGLES, I12_3):
            assert oracles.adapted(F, A) == oracles.adapted(F, A, full=True)
            assert oracles.adapted(F, A, J_EMPTY) == oracles.adapted(F, A, J_EMPTY, full=True)


def test_verify_rejects_tampering():
    cert = find_certificate(C, I12_3)
    bad_order = AdaptednessCertificate(cert.edge_order[:-1], cert.labels[:-1])
    with pytest.raises(MalformedCertificate):
        verify_certificate(C, I12_3, None, bad_order)
    lab = dict(cert.labels[0])
    first = next(iter(lab))
    lab[first] = 7
    with pytest.raises(MalformedCertificate):
        verify_certificate(C, I12_3, None, AdaptednessCertificate(cert.edge_order, (lab,) + cert.labels[1:]))
    # an honest labeling placed in a bad order can fail
    K4 = complete(4, 3)
    order = K4.sorted_edges
    labs = tuple({v: i + 1 for i, v in enumerate(e)} for e in order)
    assert not verify_certificate(K4, SINGLES, None, AdaptednessCertificate(order, labs))


def test_ij_certificate_requires_plain_part():
    cert = find_certificate(C, I12_3, J_EMPTY)
    stripped = AdaptednessCertificate(cert.edge_order, cert.labels, special_vertex=cert.special_vertex)
    with pytest.raises(MalformedCertificate):
        verify_certificate(C, I12_3, J_EMPTY, stripped)


def test_certificate_round_trip():
    for F, A, J, pins in [
        (C, I12_3, None, None),
        (C, I12_3, J_EMPTY, None),
        (grid_graph(complete(4, 3)).graph, PAIRS, J_SINGLES, tuple(range(4))),
    ]:
        cert = find_certificate(F, A, J, pins)
        text = serialize_certificate(cert)
        back = parse_certificate(text)
        assert back == cert
        assert verify_certificate(F, A, J, back)


def test_budget():
    with pytest.raises(BudgetExceeded):
        find_certificate(complete(6, 3), SINGLES, budget=3)


def test_argument_checks():
    with pytest.raises(InvalidParameters):
        find_certificate(C, Antichain.singletons(4))
    with pytest.raises(InvalidParameters):
        find_certificate(C, SINGLES, Antichain.singletons(3))
    with pytest.raises(InvalidParameters):
        find_certificate(C, SINGLES, J_EMPTY, pins=[0, 0])


def test_antichain_implies():
    assert antichain_implies(PAIRS, SINGLES)
    assert antichain_implies(PAIRS, I12_3)
    assert not antichain_implies(I12_3, PAIRS)
    assert antichain_implies(Antichain.of(3, (1, 2, 3)), PAIRS)
    with pytest.raises(InvalidParameters):
        antichain_implies(PAIRS, J_SINGLES)


@pytest.mark.parametrize("F", [complete(4, 3), C, KGraph(3, 5, {(0, 1, 2), (2, 3, 4)})], ids=["K4", "C", "path"])
def test_grid_graph_structure(F):
    g = grid_graph(F)
    f = F.n
    assert g.graph.n == f * f
    assert len(g.column_copies) == f and len(g.row_copies) == f - 1
    assert g.zeroth_row == tuple(range(f))
    seen = set()
    for place in g.copies:
        assert all(tuple(sorted(place[v] for v in e)) in g.graph.edges for e in F.edges)
        seen |= {tuple(sorted(place[v] for v in e)) for e in F.edges}
    assert seen == g.graph.edges
    # columns partition the grid, and so do the zeroth row plus the other rows
    assert sorted(v for c in g.column_copies for v in c) == list(range(f * f))
    assert sorted(list(g.zeroth_row) + g.rows(1)) == list(range(f * f))
    for place in g.row_copies:
        assert not set(place) & set(g.zeroth_row)
    # the special vertex of each column copy sits in the zeroth row
    assert {c[0] for c in g.column_copies} == set(g.zeroth_row)
    graph, row0 = g
    assert graph is g.graph and row0 == g.zeroth_row


def test_grid_columns_induce_copies():
    F = complete(4, 3)
    g = grid_graph(F)
    for col in g.column_copies:
        assert induced(g.graph, col).graph == F
