"""Interval x stream bi-series, the lazy evaluator and the interchange search."""

import itertools
import json

import numpy as np
import pytest

from qlift.biseries import (BiSeriesSpace, check_biquantale_laws, make_stream,
                            noncommutativity_witness, partial_eval_col, partial_eval_row)
from qlift.carrier import compose
from qlift.instances import make_interval, point_intervals
from qlift.interchange import (LAWS, InterchangeWitness, LazyEvaluator, atoms, dense_series,
                               interchange_search, law_sides, load_witnesses, known_constructions,
                               save_witnesses, search_law, step_stream)
from qlift.quantales import BooleanQuantale

B = BooleanQuantale()


@pytest.fixture(scope="module")
def small():
    ivs = make_interval(3)
    streams = make_stream(T=3, dim=1)
    return BiSeriesSpace(ivs, streams, B, unit1=point_intervals(ivs))


def brute_h(space, F, G):
    """Chop in the interval coordinate, stream fixed."""
    Fg, Gg = space.grid(F), space.grid(G)
    out = np.zeros_like(Fg)
    for x1, x2 in itertools.product(range(space.n1), repeat=2):
        x = compose(space.c1, x1, x2)
        if x is not None:
            out[x] |= Fg[x1] & Gg[x2]
    return out


def brute_v(space, F, G):
    """Stream split in the stream coordinate, interval fixed."""
    Fg, Gg = space.grid(F), space.grid(G)
    out = np.zeros_like(Fg)
    for f1, f2 in itertools.product(range(space.n2), repeat=2):
        f = compose(space.c2, f1, f2)
        if f is not None:
            out[:, f] |= Fg[:, f1] & Gg[:, f2]
    return out


def test_stream_carrier_is_pointwise_separation():
    c = make_stream(T=2, dim=2, values=(0, 1))
    for a, b in itertools.product(range(c.size), repeat=2):
        ea, eb = c.elements[a], c.elements[b]
        clash = any(x and y for va, vb in zip(ea, eb) for x, y in zip(va, vb))
        got = compose(c, a, b)
        if clash:
            assert got is None
        else:
            assert c.elements[got] == tuple(tuple(x + y for x, y in zip(va, vb)) for va, vb in zip(ea, eb))


def test_both_convolutions_match_brute_force(small):
    rng = np.random.default_rng(1)
    fs = small.horizontal.random(rng, 8)
    for F, G in zip(fs[::2], fs[1::2]):
        assert np.array_equal(small.grid(small.hconvolve(F, G)), brute_h(small, F, G))
        assert np.array_equal(small.grid(small.vconvolve(F, G)), brute_v(small, F, G))


def test_sections(small):
    F = small.horizontal.random(np.random.default_rng(2), 1)[0]
    assert np.array_equal(partial_eval_col(small, F, 1), small.grid(F)[1])
    assert np.array_equal(partial_eval_row(small, F, 3), small.grid(F)[:, 3])


def test_biquantale_laws_on_small_space(small):
    reports = check_biquantale_laws(small, budget=500, seed=3, bound=2000)
    assert all(r.status == "pass" for r in reports), [r.line() for r in reports if r.status != "pass"]


def test_chop_is_not_commutative(small):
    w = noncommutativity_witness(small, seed=0)
    assert w is not None
    F, G, x = w
    h = small.horizontal
    assert h.conv(F, G)[x] != h.conv(G, F)[x]
    assert np.array_equal(small.vconvolve(F, G), small.vconvolve(G, F))


# -- lazy evaluation ---------------------------------------------------------------------

def test_chop_shares_its_split_point():
    ev = LazyEvaluator(dim=1)
    f = step_stream(5, [[1, 1, 1, 0, 0]])
    assert ev.holds(("seq", ("eq", 0, 1), ("eq", 0, 0)), (0, 4), f) is False
    assert ev.holds(("seq", ("eq", 0, 1), ("true",)), (0, 4), f) is True
    assert ev.holds(("seq", ("eq", 0, 1), ("eq", 0, 1)), (0, 2), f) is True


def test_split_modes_differ_on_a_vector_stream():
    f = ((0, 1), (1, 1))
    left = ("eq", 0, 0)
    # at every point: one of f1, f2 is 0 and one of them is 1
    right = ("meet", ("or_eq", 0, 0, 1, 0), ("or_eq", 0, 1, 1, 1))
    expr = ("par", left, right)
    # f2 must sit on the right at time 0 and on the left at time 1
    assert LazyEvaluator(2, "pointwise").holds(expr, (0, 1), f) is True
    assert LazyEvaluator(2, "uniform").holds(expr, (0, 1), f) is False


@pytest.mark.parametrize("mode", ["pointwise", "uniform"])
def test_lazy_and_dense_agree(mode):
    streams = make_stream(T=4, dim=2, split_mode=mode)
    ivs = make_interval(4)
    space = BiSeriesSpace(ivs, streams, B, unit1=point_intervals(ivs))
    ev = LazyEvaluator(2, mode)
    at = atoms(2)
    memo = {}
    for law in LAWS[:3]:
        preds = tuple(at[: {"FG_le_FsG": 2}.get(law, 3)])
        for expr in law_sides(law, preds):
            grid = space.grid(dense_series(space, expr, memo))
            for i, iv in enumerate(ivs.elements):
                for j in range(0, streams.size, 5):
                    assert bool(grid[i, j]) == ev.holds(expr, (iv.lo, iv.hi), streams.elements[j])


# -- interchange search ----------------------------------------------------------------

@pytest.fixture(scope="module")
def search():
    return interchange_search(chain=5)


def test_every_non_law_has_a_verified_witness(search):
    assert len(search) == 8
    for r in search:
        w = r["witness"]
        assert w is not None and w.verify(), (r["law"], r["split_mode"])
        assert w.dim == (3 if r["law"] == "weak" else 2)


def test_witnesses_refute_on_the_dense_engine(search):
    """Re-check the dimension-2 witnesses through the dense route at chain 5."""
    for mode in ("pointwise", "uniform"):
        streams = make_stream(T=5, dim=2, split_mode=mode)
        ivs = make_interval(5)
        space = BiSeriesSpace(ivs, streams, B, unit1=point_intervals(ivs))
        for r in search:
            w = r["witness"]
            if r["split_mode"] != mode or w.dim != 2:
                continue
            lhs, rhs = law_sides(w.law, w.predicates)
            x = [(iv.lo, iv.hi) for iv in ivs.elements].index(w.x)
            f = streams.index(w.stream)
            assert space.grid(dense_series(space, lhs))[x, f]
            assert not space.grid(dense_series(space, rhs))[x, f]


def test_witness_file_round_trip(search, tmp_path):
    ws = [r["witness"] for r in search]
    path = tmp_path / "witnesses.json"
    save_witnesses(path, ws)
    assert load_witnesses(path) == ws
    data = json.loads(path.read_text())
    data[0]["stream"] = [[0] * len(v) for v in data[0]["stream"]]
    path.write_text(json.dumps(data))
    with pytest.raises(ValueError):
        load_witnesses(path)


def test_known_constructions():
    seeds = known_constructions(5)
    def refutes(law, preds, x, f, dim):
        lhs, rhs = law_sides(law, preds)
        e = LazyEvaluator(dim, "pointwise")
        return e.holds(lhs, x, f) and not e.holds(rhs, x, f)

    out = {(law, label): refutes(law, p, x, f, d) for law, cases in seeds.items()
           for label, p, x, f, d in cases}
    assert out[("FG_le_FsG", "literal")] is False
    assert out[("FG_le_FsG", "f2-reversed")] is True
    assert out[("small_left", "literal")] is True
    assert out[("small_right", "literal")] is True
    assert out[("weak", "literal")] is False


def test_search_without_seeds_still_finds_fg_witness():
    w, notes = search_law("FG_le_FsG", 5, 2, "pointwise", seeds=False)
    assert w is not None and w.verify() and w.source != "literal"


def test_witness_dict_round_trip():
    w = InterchangeWitness("small_left", "uniform",
                           (("eq", 0, 1), ("eq", 1, 0), ("or_eq", 0, 0, 1, 0)), (0, 4),
                           step_stream(5, [[1, 1, 1, 0, 0], [0] * 5]), "literal")
    assert InterchangeWitness.from_dict(json.loads(json.dumps(w.as_dict()))) == w
