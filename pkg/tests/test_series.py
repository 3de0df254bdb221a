"""Carriers, targets and convolution against brute-force oracles."""

import itertools
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qlift.carrier import Carrier, check_carrier_laws, compose, splittings, with_entry
from qlift.instances import (diagonal, make_interval, make_language, make_multiset, make_relation,
                             make_separating, make_trace, point_intervals)
from qlift.laws import check_law
from qlift.quantales import BooleanQuantale, MaxPlusQuantale, PowersetQuantale, VectorQuantale
from qlift.series import (PowerSeries, SeriesSpace, complex_product, convolve, convolve_partial,
                          star, sum_family, inf_family, unit_series, wand)

B = BooleanQuantale()

CARRIERS = {
    "relation": lambda: make_relation(3),
    "language": lambda: make_language("ab", 2),
    "trace": lambda: make_trace("pq", "a", 2),
    "fusion": lambda: make_interval(5, "fusion"),
    "nofusion": lambda: make_interval(5, "nofusion"),
    "heaplet": lambda: make_separating("heaplet"),
    "sets": lambda: make_separating("disjoint_sets"),
    "multisets": lambda: make_separating("multiset_cap", symbols="ab", cap=2),
    "vectors": lambda: make_separating("vector", dim=2, values=(0, 1, 2)),
}


def brute_conv(space, f, g):
    """Convolution by nested loops over all pairs, with scalar target operations."""
    c, t = space.carrier, space.target
    out = [t.bottom] * space.n
    for y in range(space.n):
        for z in range(space.n):
            x = compose(c, y, z)
            if x is not None:
                out[x] = int(t.join(out[x], t.mult(f[y], g[z])))
    return np.array(out, dtype=space.dtype)


@pytest.mark.parametrize("name", sorted(CARRIERS))
def test_carrier_laws_hold(name):
    c = CARRIERS[name]()
    reports = check_carrier_laws(c)
    assert all(r.ok for r in reports), [r.line() for r in reports if not r.ok]


@pytest.mark.parametrize("name", sorted(CARRIERS))
def test_splittings_match_table(name):
    c = CARRIERS[name]()
    for x in range(c.size):
        want = sorted((y, z) for y in range(c.size) for z in range(c.size) if compose(c, y, z) == x)
        assert splittings(c, x) == want


@pytest.mark.parametrize("name", ["relation", "language", "fusion", "heaplet", "multisets"])
def test_boolean_convolution_matches_brute_force(name):
    s = SeriesSpace(CARRIERS[name](), B)
    rng = np.random.default_rng(7)
    fs = s.random(rng, 12)
    for f, g in zip(fs[::2], fs[1::2]):
        assert np.array_equal(s.conv(f, g), brute_conv(s, f, g))


def test_maxplus_convolution_matches_brute_force():
    c, t = make_multiset("ab", 3)
    s = SeriesSpace(c, t)
    rng = np.random.default_rng(3)
    fs = s.random(rng, 10)
    for f, g in zip(fs[::2], fs[1::2]):
        assert np.array_equal(s.conv(f, g), brute_conv(s, f, g))


def test_boolean_convolution_is_complex_product():
    c = make_language("ab", 3)
    s = SeriesSpace(c, B)
    xs, ys = {1, 3}, {0, 2}
    f = s.char(xs)
    g = s.char(ys)
    got = {x for x in range(s.n) if s.conv(f, g)[x]}
    assert got == complex_product(c, xs, ys)


def test_language_product_concatenates():
    c = make_language("ab", 2)
    s = SeriesSpace(c, B)
    f = PowerSeries(s, s.char([c.index("a"), c.index("b")]))
    g = PowerSeries(s, s.char([c.index("a")]))
    h = convolve(f, g)
    assert {c.labels[x] for x in range(s.n) if h[x]} == {"aa", "ba"}


def test_series_in_different_spaces_rejected():
    s1 = SeriesSpace(make_language("ab", 2), B)
    s2 = SeriesSpace(make_language("ab", 2), B)
    with pytest.raises(ValueError):
        convolve(PowerSeries(s1, s1.zero()), PowerSeries(s2, s2.zero()))


def test_empty_families_give_bottom_and_top():
    s = SeriesSpace(make_relation(2), B)
    assert np.all(sum_family([], s).values == 0)
    assert np.all(inf_family([], s).values == 1)
    with pytest.raises(ValueError):
        sum_family([])


def test_partial_target_needs_convolve_partial():
    c = make_separating("vector", dim=2, values=(0, 1))
    s = SeriesSpace(c, VectorQuantale(2, (0, 1)))
    f = PowerSeries(s, s.zero())
    with pytest.raises(TypeError):
        convolve(f, f)
    assert convolve_partial(f, f) == f


def _relation_series(s, c, pairs):
    return PowerSeries(s, s.char([c.index(p) for p in pairs]))


def test_relation_star_is_reflexive_transitive_closure():
    rnd = random.Random(11)
    c = make_relation(4)
    s = SeriesSpace(c, B, unit=diagonal(c))
    pts = range(1, 5)
    for _ in range(20):
        pairs = [(i, j) for i in pts for j in pts if rnd.random() < 0.3]
        g = nx.DiGraph()
        g.add_nodes_from(pts)
        g.add_edges_from(pairs)
        want = {(i, j) for i in pts for j in pts if i == j or nx.has_path(g, i, j)}
        got = star(_relation_series(s, c, pairs))
        assert {c.elements[x] for x in range(s.n) if got[x]} == want


def test_relation_unit_is_diagonal():
    c = make_relation(3)
    s = SeriesSpace(c, B, unit=diagonal(c))
    one = unit_series(s) if c.unit is not None else PowerSeries(s, s.one())
    assert {c.elements[x] for x in range(s.n) if one[x]} == {(1, 1), (2, 2), (3, 3)}


def test_interval_point_unit():
    c = make_interval(4)
    s = SeriesSpace(c, B, unit=point_intervals(c))
    pts = {c.labels[x] for x in range(s.n) if s.one()[x]}
    assert pts == {"[0,0]", "[1,1]", "[2,2]", "[3,3]"}


def test_wand_is_greatest_solution_exhaustively():
    c = make_separating("heaplet", locations=("l1",), values=(0, 1))
    s = SeriesSpace(c, B)
    every = s.enumerate()
    for f in every:
        for g in every:
            w = s.wand(f, g)
            assert s.leq(s.conv(f, w), g)
            for h in every:
                assert bool(s.leq(s.conv(f, h), g)) == bool(s.leq(h, w))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 9 - 1), st.integers(0, 2 ** 9 - 1), st.integers(0, 2 ** 9 - 1))
def test_wand_adjunction_on_heaplets(a, b, h):
    c = make_separating("heaplet")
    s = SeriesSpace(c, B)
    bits = lambda k: np.array([(k >> i) & 1 for i in range(s.n)], dtype=np.uint8)
    f, g, hh = bits(a), bits(b), bits(h)
    assert bool(s.leq(s.conv(f, hh), g)) == bool(s.leq(hh, wand(PowerSeries(s, f), PowerSeries(s, g)).values))


def test_maxplus_boolean_at_cap_zero():
    t = MaxPlusQuantale(0)
    b = {-1: 0, 0: 1}
    for x, y in itertools.product((-1, 0), repeat=2):
        assert b[int(t.mult(x, y))] == (b[x] & b[y])
        assert b[int(t.join(x, y))] == (b[x] | b[y])


def test_powerset_quantale_is_language_product():
    words = make_language("ab", 2)
    t = PowersetQuantale(words)
    a, b = 1 << words.index("a"), 1 << words.index("b")
    prod = t.mult(a | b, a)
    assert set(t.members(prod)) == {"aa", "ba"}


def test_vector_target_poison_and_discard():
    poison = VectorQuantale(1, (0, 1))
    one = poison.vector_code[(1,)]
    assert int(poison.mult(one, one)) == poison.clash
    discard = VectorQuantale(1, (0, 1), clash="discard")
    assert int(discard.mult(one, one)) == 0


def test_vector_discard_breaks_associativity():
    c = make_separating("vector", dim=1, values=(0, 1))
    good = SeriesSpace(c, VectorQuantale(1, (0, 1)))
    bad = SeriesSpace(c, VectorQuantale(1, (0, 1), clash="discard"))
    assoc = lambda s, f, g, h: (s.conv(s.conv(f, g), h), s.conv(f, s.conv(g, h)), "eq")
    assert check_law(good, "assoc", 3, assoc, bound=10 ** 6).status == "pass"
    r = check_law(bad, "assoc", 3, assoc, bound=10 ** 6)
    assert r.status == "fail" and r.witness


def test_corrupted_carrier_fails_a_law():
    c = make_language("ab", 2)
    broken = with_entry(c, c.unit, 1, 2)
    assert not all(r.ok for r in check_carrier_laws(broken))


def test_carrier_from_function_rejects_nothing_silently():
    c = Carrier.from_function([0, 1, 2], lambda a, b: a + b if a + b <= 2 else None, unit=0,
                              commutative=True)
    assert compose(c, 1, 1) == 2 and compose(c, 2, 1) is None
