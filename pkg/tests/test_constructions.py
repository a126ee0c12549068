import hashlib
import itertools
from fractions import Fraction

import pytest

from quasipack import hypercore
from quasipack.constructions import (
    GENERATOR,
    Coloring,
    color_sum,
    gen_A,
    gen_gnp,
    gen_prop19,
    parse_coloring,
    serialize_coloring,
    subset_draw,
    zero_color_layout,
)
from quasipack.errors import InvalidParameters, ParseError
from quasipack.hypercore import link
from quasipack.layouts import count_cliques, intersect_count


def test_subset_draw_is_documented_hash():
    digest = hashlib.blake2b(b"gnp|7|0,1,2", digest_size=8).digest()
    assert subset_draw("gnp", 7, (0, 1, 2)) == int.from_bytes(digest, "big")
    assert GENERATOR == "qp-blake2b-v1"


def test_gen_A_deterministic_and_seed_sensitive():
    a1, c1 = gen_A(3, 15, 4)
    a2, c2 = gen_A(3, 15, 4)
    assert a1 == a2 and c1 == c2
    assert hypercore.serialize(a1) == hypercore.serialize(a2)
    assert gen_A(3, 15, 5)[0] != a1


def test_gen_A_rule():
    for k in (2, 3, 4):
        H, col = gen_A(k, 8, 1)
        for E in itertools.combinations(range(8), k):
            expect = sum(col[T] for T in itertools.combinations(E, k - 1)) % k != 0
            assert (E in H.edges) == expect
            assert (color_sum(col, E) != 0) == expect


def test_gen_A_is_prefix_stable():
    # draws depend only on the subset, so a smaller n sees the same colours
    _, small = gen_A(3, 10, 2)
    _, big = gen_A(3, 14, 2)
    assert all(big[T] == c for T, c in small.colors.items())


def test_gnp_extremes_and_determinism():
    assert len(gen_gnp(3, 9, 1, 0).edges) == 84
    assert len(gen_gnp(3, 9, 0, 0).edges) == 0
    assert gen_gnp(3, 12, Fraction(1, 2), 3) == gen_gnp(3, 12, "1/2", 3)
    with pytest.raises(InvalidParameters):
        gen_gnp(3, 5, Fraction(3, 2), 0)


def test_gnp_density_is_roughly_p():
    H = gen_gnp(3, 30, Fraction(9, 10), 1)
    assert abs(H.density() - 0.9) < 0.02


def test_prop19_link_is_construction():
    for seed in range(3):
        H, x = gen_prop19(3, 14, seed)
        base = gen_gnp(3, 14, Fraction(2, 3), seed)
        expect, _ = gen_A(2, 13, seed)
        assert link(H, x).graph == expect
        assert {e for e in H.edges if x not in e} == {e for e in base.edges if x not in e}


def test_prop19_special_vertex_elsewhere():
    H, x = gen_prop19(3, 10, 0, special=4)
    assert x == 4
    assert link(H, 4).graph == gen_A(2, 9, 0)[0]


def test_prop19_link_triangle_free():
    H, x = gen_prop19(3, 30, 8)
    lk = link(H, x).graph
    for a, b, c in itertools.combinations(range(lk.n), 3):
        assert not {(a, b), (a, c), (b, c)} <= lk.edges


def test_zero_color_layout():
    H, col = gen_A(3, 18, 6)
    L = zero_color_layout(col)
    assert L.antichain.members == ((1, 2), (1, 3), (2, 3))
    assert all(L.edges[m] == col.color_class(0).edges for m in L.antichain.members)
    assert intersect_count(H, L) == 0
    # ordered triangles of the colour-0 graph
    Z = col.color_class(0).edges
    tri = sum(1 for t in itertools.combinations(range(18), 3) if set(itertools.combinations(t, 2)) <= Z)
    assert count_cliques(L) == 6 * tri


def test_coloring_round_trip_and_errors():
    _, col = gen_A(3, 7, 0)
    assert parse_coloring(serialize_coloring(col)) == col
    with pytest.raises(ParseError):
        parse_coloring("coloring 3 3\n0 1 0\n0 2 1\n")
    with pytest.raises(ParseError):
        parse_coloring("colors 3 3\n")
    with pytest.raises(InvalidParameters):
        Coloring(3, 3, {(0, 1): 0, (0, 2): 5, (1, 2): 0})


def test_argument_checks():
    with pytest.raises(InvalidParameters):
        gen_A(1, 5, 0)
    with pytest.raises(InvalidParameters):
        gen_prop19(2, 5, 0)
