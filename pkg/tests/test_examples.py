"""Worked examples: multisets, vectors, linear maps, automata, frames and streams."""

import itertools

import pytest

from qlift.demos import (AUTOMATON_EDGES, DEMOS, automaton_matrix, block_summands, demo_vector,
                         nofusion_step_down)
from qlift.instances import make_multiset, multiset_text, multiset_values
from qlift.matrices import (apply_matrix, matrix_mult, matrix_parallel, matrix_parallel_literal,
                            matrix_power, matrix_star)
from qlift.quantales import vector_separate
from qlift.series import SeriesSpace


def walks(k, i, j):
    """Words labelling walks of exactly ``k`` steps from ``i`` to ``j``."""
    out = set()
    for mids in itertools.product(range(3), repeat=k - 1):
        path = (i,) + mids + (j,)
        steps = [AUTOMATON_EDGES.get((a, b), "") for a, b in zip(path, path[1:])]
        if all(steps):
            out |= {"".join(w) for w in itertools.product(*steps)}
    return out


@pytest.fixture(scope="module")
def automaton():
    return automaton_matrix(3)


def test_automaton_powers_match_walk_enumeration(automaton):
    m, _ = automaton
    t = m.target
    for k in (1, 2, 3):
        mk = matrix_power(m, k)
        for i, j in itertools.product(range(3), repeat=2):
            assert set(t.members(mk[i, j])) == walks(k, i, j), (k, i, j)


def test_automaton_square_by_hand(automaton):
    m, _ = automaton
    m2 = matrix_mult(m, m)
    assert set(m.target.members(m2[0, 0])) == {"aa", "ab", "ba", "bb"}
    assert set(m.target.members(m2[0, 2])) == {"ba"}
    assert set(m.target.members(m2[1, 2])) == set()


def test_automaton_star_is_reachability(automaton):
    m, _ = automaton
    st = matrix_star(m)
    for i, j in itertools.product(range(3), repeat=2):
        want = set().union(*(walks(k, i, j) for k in range(1, 4)))
        if i == j:
            want.add("")
        assert {w if w != "ε" else "" for w in m.target.members(st[i, j])} == want


def test_multiset_identities():
    c, t = make_multiset("abcd", 9)
    s = SeriesSpace(c, t)
    f, g = multiset_values(s, "a2b5c"), multiset_values(s, "ab3d2")
    assert multiset_text(s, s.conv(f, g)) == "a3b8cd2"
    assert multiset_text(s, s.join(f, g)) == "a2b5cd2"
    assert multiset_text(s, s.meet(f, g)) == "ab3"


def test_vector_products():
    assert vector_separate((5, 0, 7), (0, 4, 0)) == (5, 4, 7)
    assert vector_separate((5, 0, 7), (0, 4, 4)) is None
    assert vector_separate((0, 0), (0, 0)) == (0, 0)


def test_linear_map_summands():
    first, second = block_summands()
    assert first is None
    assert second == (1 * 2, 8 * 3)
    assert apply_matrix(((1, 2), (3, 4)), (2, 0)) == (2, 6)


def test_parallel_matrices_on_disjoint_blocks():
    f = ((1, 0), (0, 0))
    g = ((0, 0), (0, 1))
    assert matrix_parallel(f, g) == ((1, 0), (0, 1))
    assert matrix_parallel(f, f) is None


def test_literal_parallel_rule_loses_the_zero_unit():
    zero = ((0, 0), (0, 0))
    g = ((0, 0), (0, 1))
    assert matrix_parallel(zero, g) == g
    assert matrix_parallel_literal(zero, g) is None
    assert matrix_parallel_literal(g, zero) == g


def test_nofusion_chop_of_step_down_stream():
    assert nofusion_step_down() is True


@pytest.mark.parametrize("name", sorted(DEMOS))
def test_demo_passes(name):
    lines, ok = DEMOS[name]()
    assert ok, "\n".join(lines)
    assert not any(line.startswith("FAIL") for line in lines)


def test_demo_vector_lines_name_values():
    lines, _ = demo_vector()
    assert any("(5, 4, 7)" in line for line in lines)
