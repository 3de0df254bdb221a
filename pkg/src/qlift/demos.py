"""Worked examples with their expected values; each demo returns ``(lines, ok)``."""

from __future__ import annotations

from .instances import Interval, make_language, make_multiset, make_separating, multiset_text, multiset_values
from .interchange import LazyEvaluator, step_stream
from .matrices import MatrixSeries, apply_matrix, matrix_power, matrix_star, path_labels
from .quantales import BooleanQuantale, PowersetQuantale, vector_separate
from .series import SeriesSpace
from .transformers import PredicateAlgebra, frame_sweep_all, heap_write, is_local, kleisli_lift


def _check(lines, label, got, want):
    ok = got == want
    lines.append(f"{'PASS' if ok else 'FAIL'}  {label}: got {got}, expected {want}")
    return ok


# -- automaton ---------------------------------------------------------------------

AUTOMATON_EDGES = {(0, 0): "ab", (0, 1): "b", (1, 2): "a"}


def automaton_matrix(cap=3):
    """Transition matrix over languages truncated at ``cap`` letters."""
    words = make_language("ab", cap)
    target = PowersetQuantale(words)
    n = 3
    rows = [[target.bottom] * n for _ in range(n)]
    for (i, j), letters in AUTOMATON_EDGES.items():
        rows[i][j] = sum(1 << words.index(a) for a in letters)
    return MatrixSeries.of(target, rows), words


def _words_of(target, v):
    return {w for w in target.members(v)}


def demo_automaton(cap=3):
    lines = ["three-state automaton, transitions 1-a,b->1, 1-b->2, 2-a->3"]
    m, words = automaton_matrix(cap)
    t = m.target
    ok = True
    for k in range(1, cap + 1):
        mk = matrix_power(m, k)
        lines.append(f"M^{k}:")
        lines += ["  " + "  ".join(t.label(mk[i, j]) for j in range(3)) for i in range(3)]
        for i in range(3):
            for j in range(3):
                oracle = path_labels({e: set(ls) for e, ls in AUTOMATON_EDGES.items()}, 3, i, j, k)
                got = {w for w in _words_of(t, mk[i, j])}
                if got != oracle:
                    ok = False
                    lines.append(f"FAIL  M^{k}[{i + 1},{j + 1}] differs from the path oracle")
    lines.append(f"{'PASS' if ok else 'FAIL'}  M^k agrees with path enumeration for k = 1..{cap}")
    st = matrix_star(m)
    star_ok = True
    for i in range(3):
        for j in range(3):
            reach = set()
            for k in range(cap + 1):
                reach |= path_labels({e: set(ls) for e, ls in AUTOMATON_EDGES.items()}, 3, i, j, k)
            star_ok &= _words_of(t, st[i, j]) == {w if w else "ε" for w in reach}
    lines.append("M*:")
    lines += ["  " + "  ".join(t.label(st[i, j]) for j in range(3)) for i in range(3)]
    lines.append(f"{'PASS' if star_ok else 'FAIL'}  M* equals the reachability languages up to length {cap}")
    return lines, ok and star_ok


# -- multisets -----------------------------------------------------------------------

def demo_multiset():
    carrier, target = make_multiset("abcd", cap=9)
    s = SeriesSpace(carrier, target)
    f, g = multiset_values(s, "a2b5c"), multiset_values(s, "ab3d2")
    lines = ["multisets as series into max-plus over the idempotent symbol carrier"]
    ok = _check(lines, "a2b5c ⊎ ab3d2", multiset_text(s, s.conv(f, g)), "a3b8cd2")
    ok &= _check(lines, "a2b5c + ab3d2", multiset_text(s, s.join(f, g)), "a2b5cd2")
    ok &= _check(lines, "a2b5c ⊓ ab3d2", multiset_text(s, s.meet(f, g)), "ab3")
    return lines, ok


# -- vectors and linear maps -------------------------------------------------------

BLOCK_COEFFS = dict(a1=1, b1=2, c1=3, d1=4, a2=5, b2=6, c2=7, d2=8, x=2, y=3)


def block_summands(k=BLOCK_COEFFS):
    """The two convolution summands of the linear-map example at concrete coefficients."""
    first = vector_separate(apply_matrix(((k["a1"], k["b1"]), (k["c1"], k["d1"])), (k["x"], 0)),
                            apply_matrix(((k["a2"], k["b2"]), (k["c2"], k["d2"])), (0, k["y"])))
    second = vector_separate(apply_matrix(((k["a1"], k["b1"]), (0, k["d1"])), (k["x"], 0)),
                             apply_matrix(((k["a2"], 0), (k["c2"], k["d2"])), (0, k["y"])))
    return first, second


def demo_vector():
    lines = ["vectors under separation"]
    ok = _check(lines, "(5,0,7) ∗ (0,4,0)", vector_separate((5, 0, 7), (0, 4, 0)), (5, 4, 7))
    ok &= _check(lines, "(5,0,7) ∗ (0,4,4)", vector_separate((5, 0, 7), (0, 4, 4)), None)
    k = BLOCK_COEFFS
    first, second = block_summands()
    lines.append("linear maps at " + ", ".join(f"{a}={b}" for a, b in k.items()))
    ok &= _check(lines, "full matrices on (x,0) and (0,y)", first, None)
    ok &= _check(lines, "block matrices on (x,0) and (0,y)", second, (k["a1"] * k["x"], k["d2"] * k["y"]))
    return lines, ok


# -- frame rule ------------------------------------------------------------------------

def demo_frame():
    c = make_separating("heaplet")
    alg = PredicateAlgebra(c)
    f = kleisli_lift(alg, heap_write(c, "l1", 1))
    local, _ = is_local(alg, f)
    lines = ["heap write [l1] := 1 on two locations with values {0,1}, faulting when unallocated"]
    ok = _check(lines, "write is local (f ∗ id <= f)", local, True)
    checked, premises, viol, _ = frame_sweep_all(alg, f)
    lines.append(f"frame sweep over all (p, q, r): {checked} triples, {premises} with p <= f q")
    ok &= _check(lines, "frame rule violations", viol, 0)
    # instance: {l1 -> 0} * {l2 -> 1} before, {l1 -> 1} * {l2 -> 1} after
    pre = alg.mask([(0, None)])
    frame = alg.mask([(None, 1)])
    post = alg.mask([(1, None)])
    ok &= _check(lines, "{l1↦0} <= f {l1↦1}", (pre & ~int(f[post])) == 0, True)
    ok &= _check(lines, "{l1↦0}∗{l2↦1} <= f ({l1↦1}∗{l2↦1})",
                 (alg.star(pre, frame) & ~int(f[alg.star(post, frame)])) == 0, True)
    return lines, ok


# -- streams ---------------------------------------------------------------------------

def demo_stream():
    lines = ["stream interval predicates, f t = t^3 on the integers -10..10"]
    ts = range(-10, 11)
    f = {t: t ** 3 for t in ts}

    def F(lo, hi):
        return all(f[t] >= 0 for t in range(lo, hi + 1))

    def G(lo, hi):
        return all(f[t] < 0 for t in range(lo, hi + 1))

    ok = _check(lines, "F [0,10]", F(0, 10), True)
    ok &= _check(lines, "G [-7,-1]", G(-7, -1), True)
    ok &= _check(lines, "F [-2,-1]", F(-2, -1), False)
    ok &= _check(lines, "G [-7,0]", G(-7, 0), False)
    ev = LazyEvaluator(dim=2)
    lines.append("chain 0..4 with closed intervals; a chop shares its split point")
    down = step_stream(5, [[1, 1, 1, 0, 0], [0, 0, 1, 1, 1]])
    ok &= _check(lines, "(f1=1 · f2=1) [0,4] on f1 = 11100, f2 = 00111",
                 ev.holds(("seq", ("eq", 0, 1), ("eq", 1, 1)), (0, 4), down), True)
    ok &= _check(lines, "(f1=1 · f1=0) [0,4] on f1 = 11100 (point 2 is shared)",
                 ev.holds(("seq", ("eq", 0, 1), ("eq", 0, 0)), (0, 4), down), False)
    ok &= _check(lines, "(f1=1 ∗ f2=1) [0,4] on the same stream",
                 ev.holds(("par", ("eq", 0, 1), ("eq", 1, 1)), (0, 4), down), False)
    lines.append("intervals without fusion: [0,2) · [2,4] splits the chain")
    ok &= _check(lines, "(f1=1 · f1=0) [0,4] on f1 = 11000", nofusion_step_down(), True)
    return lines, ok


def nofusion_step_down():
    """Chop of ``f1 = 1`` and ``f1 = 0`` over intervals without fusion, on a step-down stream."""
    from .biseries import BiSeriesSpace, make_stream
    from .instances import make_interval
    ivs = make_interval(5, "nofusion")
    streams = make_stream(T=5, dim=1)
    space = BiSeriesSpace(ivs, streams, BooleanQuantale())

    def test(value):
        return space.from_predicate(lambda iv, f: all(f[t][0] == value for t in interval_points(iv)))

    chop = space.hconvolve(test(1), test(0))
    x = ivs.index(Interval(0, 4))
    f = streams.index(step_stream(5, [[1, 1, 0, 0, 0]]))
    return bool(space.grid(chop)[x, f])


def interval_points(iv):
    """Chain points of an interval with open or closed ends."""
    if iv.empty:
        return []
    return [t for t in range(iv.lo, iv.hi + 1)
            if (t != iv.lo or iv.lo_closed) and (t != iv.hi or iv.hi_closed)]


DEMOS = {
    "automaton": demo_automaton,
    "multiset": demo_multiset,
    "vector": demo_vector,
    "frame": demo_frame,
    "stream": demo_stream,
}
