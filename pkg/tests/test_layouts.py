import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasipack.errors import InvalidParameters, ParseError
from quasipack.hypercore import KGraph, complete
from quasipack.layouts import (
    Antichain,
    Layout,
    count_cliques,
    enumerate_cliques,
    falling_factorial,
    format_antichain,
    intersect_count,
    is_full,
    parse_antichain,
    parse_layout,
    serialize_layout,
)

from oracles import cliques as brute_cliques
from oracles import rand_graph


def all_antichains(k):
    subsets = [s for r in range(k + 1) for s in itertools.combinations(range(1, k + 1), r)]
    for r in range(1, len(subsets) + 1):
        for fam in itertools.combinations(subsets, r):
            if all(not set(a) <= set(b) for a in fam for b in fam if a != b):
                yield Antichain(k, fam)


def random_layout(rng, A, n, p=0.6):
    edges = {}
    for m in A.members:
        if not m:
            edges[m] = frozenset({()}) if rng.random() < 0.8 else frozenset()
        else:
            edges[m] = rand_graph(rng, len(m), n, p).edges
    return Layout(A, n, edges)


def test_falling_factorial():
    assert falling_factorial(6, 3) == 120
    assert falling_factorial(3, 0) == 1
    assert falling_factorial(2, 3) == 0


def test_antichain_validation():
    with pytest.raises(InvalidParameters):
        Antichain.of(3, (1,), (1, 2))
    with pytest.raises(InvalidParameters):
        Antichain.of(3, (4,))
    with pytest.raises(InvalidParameters):
        Antichain(3, ())
    A = Antichain.of(3, (3,), (2, 1))
    assert A.members == ((3,), (1, 2))
    assert A == parse_antichain("1,2|3", 3)


def test_antichain_text():
    for k in (2, 3):
        for A in all_antichains(k):
            assert parse_antichain(format_antichain(A), k) == A
    assert parse_antichain("e", 3).members == ((),)
    with pytest.raises(ParseError):
        parse_antichain("1,x", 3)


def test_is_full():
    assert is_full(Antichain.uniform(3, 2))
    assert is_full(Antichain.of(3, (1, 2), (3,)))
    assert not is_full(Antichain.of(3, (1, 2)))
    assert not is_full(Antichain.of(3, (1,), (2,)))


def test_covers():
    A = Antichain.of(3, (1, 2), (3,))
    assert A.covers([]) and A.covers([2, 1]) and A.covers([3])
    assert not A.covers([1, 3])


@pytest.mark.parametrize("k", [2, 3])
def test_counts_match_brute_force_for_every_antichain(k):
    rng = random.Random(k)
    for A in all_antichains(k):
        for _ in range(3):
            n = rng.randint(k, 6)
            L = random_layout(rng, A, n)
            H = rand_graph(rng, k, n)
            ref = brute_cliques(L)
            assert count_cliques(L) == len(ref)
            assert list(enumerate_cliques(L)) == ref
            assert intersect_count(H, L) == sum(tuple(sorted(t)) in H.edges for t in ref)


def test_fixed_positions():
    rng = random.Random(3)
    A = Antichain.uniform(3, 2)
    L = random_layout(rng, A, 6)
    ref = brute_cliques(L)
    for pos, v in [(0, 2), (2, 5)]:
        assert count_cliques(L, fixed={pos: v}) == sum(t[pos] == v for t in ref)


def test_full_layout_counts_falling_factorial():
    A = Antichain.of(3, ())
    L = Layout(A, 7, {(): frozenset({()})})
    assert count_cliques(L) == 7 * 6 * 5
    assert intersect_count(complete(7, 3), L) == 7 * 6 * 5
    assert count_cliques(Layout(A, 7, {(): frozenset()})) == 0


def test_layout_validation():
    A = Antichain.of(3, (1, 2))
    with pytest.raises(InvalidParameters):
        Layout(A, 4, {(1, 2): frozenset({(0, 1, 2)})})
    with pytest.raises(InvalidParameters):
        Layout(A, 4, {})


def test_toggled():
    A = Antichain.of(3, (1, 2), (3,))
    L = Layout.from_graphs(A, {(1, 2): KGraph(2, 4), (3,): KGraph(1, 4, {(0,)})})
    L2 = L.toggled((1, 2), (0, 1))
    assert (0, 1) in L2.graph((1, 2)).edges and (0, 1) not in L.graph((1, 2)).edges
    assert L2.toggled((1, 2), (0, 1)) == L


@given(st.integers(0, 10_000), st.integers(2, 3), st.integers(3, 6))
@settings(max_examples=60, deadline=None)
def test_layout_round_trip(seed, k, n):
    rng = random.Random(seed)
    A = rng.choice(list(all_antichains(k)))
    L = random_layout(rng, A, n)
    text = serialize_layout(L)
    assert parse_layout(text) == L
    assert serialize_layout(parse_layout(text)) == text


def test_parse_layout_errors():
    with pytest.raises(ParseError):
        parse_layout("layout 3 x\n")
    with pytest.raises(ParseError):
        parse_layout("layout 3 4\nI: 1,2\n3 4 0\n")
    with pytest.raises(ParseError):
        parse_layout("layout 3 4\nI: empty maybe\n")
