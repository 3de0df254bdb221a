"""Futuristic lifting, predicate transformers and the Hoare rules."""

import numpy as np
import pytest

from qlift.futuristic import (OmegaWord, check_futuristic_laws, futuristic_convolve,
                              futuristic_space, futuristic_units, language_product_oracle,
                              make_futuristic_intervals, make_infinite_words)
from qlift.hoare import (RULE_GROUPS, check_concurrency_rule, check_hoare_rules, check_rule,
                         check_star_laws, check_strengthened_rules, negative_controls, triple_valid)
from qlift.instances import diagonal, make_interval, make_language, make_relation, make_separating, point_intervals
from qlift.quantales import BooleanQuantale
from qlift.series import PowerSeries, SeriesSpace
from qlift.transformers import (FAULT, NotLocal, PredicateAlgebra, StateTransformer, check_frame_suite,
                                check_multiplicative, frame_check, heap_write, is_local,
                                is_local_pointwise, kleisli_lift, pt_compose, state_transformers,
                                wand_adjunction)

B = BooleanQuantale()


# -- futuristic -----------------------------------------------------------------------

@pytest.mark.parametrize("make", [lambda: make_infinite_words("a", 2), lambda: make_futuristic_intervals(4)])
def test_futuristic_law_pattern(make):
    reports = {r.law: r for r in check_futuristic_laws(make(), B, budget=2000, seed=1,
                                                       unit=futuristic_units(make()))}
    for law in ("conv-associativity", "left-annihilation", "right-distributivity-0",
                "right-distributivity-3", "left-distributivity-1", "left-unit", "right-unit"):
        assert reports[law].status == "pass", reports[law].line()
    for law in ("right-annihilation", "left-distributivity-0"):
        assert reports[law].status == "fail" and reports[law].witness
    assert all(r.ok for r in reports.values())


def test_futuristic_product_matches_language_oracle():
    c = make_infinite_words("ab", 2)
    s = futuristic_space(c, B)
    rng = np.random.default_rng(5)
    for f, g in zip(s.random(rng, 10)[::2], s.random(rng, 10)[1::2]):
        xs = {c.elements[i] for i in np.flatnonzero(f)}
        ys = {c.elements[i] for i in np.flatnonzero(g)}
        h = futuristic_convolve(PowerSeries(s, f), PowerSeries(s, g))
        assert {c.elements[i] for i in np.flatnonzero(h.values)} == language_product_oracle(c, xs, ys)


def test_infinite_word_keeps_its_prefix():
    c = make_infinite_words("a", 2)
    a, inf = c.index("a"), c.index(OmegaWord("", "a"))
    assert c.elements[c.table[a, inf]] == OmegaWord("a", "a")
    assert c.table[inf, a] == -1


def test_right_annihilation_fails_only_at_unbounded_points():
    c = make_futuristic_intervals(3)
    s = futuristic_space(c, B)
    f = s.full()
    prod = s.conv(f, s.zero())
    assert {c.labels[x] for x in np.flatnonzero(prod)} == {"[0,∞]", "[1,∞]", "[2,∞]"}


# -- predicate transformers --------------------------------------------------------------

@pytest.fixture(scope="module")
def heap():
    c = make_separating("heaplet")
    return c, PredicateAlgebra(c)


def brute_kleisli(c, st, y):
    return {x for x in range(c.size) if st(x) is not FAULT and st(x) <= y}


def test_kleisli_lift_matches_definition(heap):
    c, alg = heap
    for st in state_transformers(c, seed=3)[:10]:
        f = kleisli_lift(alg, st)
        for y in range(0, alg.size, 7):
            ys = {b for b in range(c.size) if (y >> b) & 1}
            assert {x for x in range(c.size) if (int(f[y]) >> x) & 1} == brute_kleisli(c, st, ys)


def test_kleisli_lifts_preserve_nonempty_meets(heap):
    c, alg = heap
    for st in state_transformers(c, seed=0)[:8]:
        f = kleisli_lift(alg, st)
        bad = check_multiplicative(alg, f, max_family=2)
        assert all(bad[k] == 0 for k in (1, 2)), (st.name, bad)


def test_faulting_lift_misses_the_empty_meet(heap):
    c, alg = heap
    f = kleisli_lift(alg, heap_write(c, "l1", 1))
    assert int(f[alg.full]) != alg.full          # f(top) is not top
    assert check_multiplicative(alg, f, max_family=0)[0] == 1


def test_locality_checks_agree(heap):
    c, alg = heap
    for st in state_transformers(c, seed=2):
        f = kleisli_lift(alg, st)
        assert is_local(alg, f)[0] == is_local_pointwise(alg, f)[0], st.name


def test_heap_write_is_local_and_constant_emp_is_not(heap):
    c, alg = heap
    assert is_local(alg, kleisli_lift(alg, heap_write(c, "l2", 0)))[0]
    emp = alg.constant(alg.mask([(None, None)]))
    assert not is_local(alg, emp)[0]
    with pytest.raises(NotLocal):
        frame_check(alg, emp, 0, 0, 0)


def test_kleisli_lift_is_contravariant_composition(heap):
    c, alg = heap
    a, b = state_transformers(c, seed=4)[:2]
    ab = StateTransformer(c, [FAULT if a(x) is FAULT or any(b(y) is FAULT for y in a(x))
                              else set().union(*(b(y) for y in a(x))) for x in range(c.size)])
    assert np.array_equal(kleisli_lift(alg, ab), pt_compose(kleisli_lift(alg, a), kleisli_lift(alg, b)))


def test_frame_suite(heap):
    c, alg = heap
    reports = check_frame_suite(alg, SeriesSpace(c, B), seed=0)
    assert all(r.ok for r in reports), [r.line() for r in reports if not r.ok]
    assert any(r.law == "frame-rule[const:emp]" and r.status == "fail" for r in reports)
    wand = next(r for r in reports if r.law == "wand-adjunction")
    assert wand.status == "pass" and wand.tuples_checked == 512 ** 3


def test_wand_adjunction_small_sweep():
    c = make_separating("heaplet", locations=("l1",), values=(0, 1))
    checked, bad = wand_adjunction(SeriesSpace(c, B))
    assert checked == 8 ** 3 and bad is None


# -- Hoare logic ---------------------------------------------------------------------------

def relation_space():
    c = make_relation(3)
    return c, SeriesSpace(c, B, unit=diagonal(c))


def test_relation_triple():
    c, s = relation_space()
    rel = lambda pairs: PowerSeries(s, s.char([c.index(p) for p in pairs]))
    pre = rel([(1, 1)])                       # start in state 1
    prog = rel([(1, 2), (2, 3)])              # step to the next state
    assert triple_valid(pre, prog, rel([(1, 2)]))
    assert not triple_valid(pre, prog, rel([(1, 3)]))
    assert triple_valid(pre, prog * prog, rel([(1, 3)]))


SPACES = {
    "relation": lambda: relation_space()[1],
    "language": lambda: SeriesSpace(make_language("ab", 2), B),
    "interval": lambda: SeriesSpace(make_interval(5), B, unit=point_intervals(make_interval(5))),
    "heaplet": lambda: SeriesSpace(make_separating("heaplet"), B),
}


@pytest.mark.parametrize("name", sorted(SPACES))
def test_hoare_rules_hold(name):
    s = SPACES[name]()
    reports = (check_hoare_rules(s, budget=8000, seed=1) + check_strengthened_rules(s, budget=8000, seed=1)
               + check_concurrency_rule(s, budget=8000, seed=1))
    assert all(r.status == "pass" for r in reports), [r.line() for r in reports if r.status != "pass"]


@pytest.mark.parametrize("name", ["relation", "language"])
def test_star_laws_hold(name):
    reports = check_star_laws(SPACES[name](), budget=8000, seed=1)
    assert all(r.status == "pass" for r in reports)


def test_directed_samples_satisfy_premises():
    s = SPACES["language"]()
    rule = next(r for r in RULE_GROUPS["hoare"]() if r.name == "sequential")
    r = check_rule(s, rule, budget=4096, seed=0)
    assert r.notes["premise_satisfied"] >= 3000


def test_broken_validities_break_rules():
    s = SPACES["relation"]()
    controls = negative_controls(s, budget=2000, seed=0)
    strict = {r.law for r in controls["strict"] if r.status == "fail"}
    meet = {r.law for r in controls["meet"] if r.status == "fail"}
    assert {"skip[strict]", "choice[strict]", "star[strict]"} <= strict
    assert "sequential[meet]" in meet


def test_rule_needing_unit_is_skipped_without_one():
    s = SeriesSpace(make_relation(2), B, unit=None)
    skip = next(r for r in RULE_GROUPS["hoare"]() if r.name == "skip")
    assert check_rule(s, skip).status == "skipped"
