import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmweb.diagram import canonical_form, is_generic, single_color_forest, web_to_diagram
from harmweb.dihedral import diagram_of
from harmweb.errors import DiagramError, NonGenericError, NumericalError, UsageError
from harmweb.gridweb import sign_grid_oracle
from harmweb.poly import parse_polynomial, random_monic
from harmweb.strata import (all_words, base_diagram, catalan, dissipate, enumerate_generic, forest_to_word,
                            maximal_parenthesizations, noncrossing_matchings, parse_word, pentagon_check,
                            realize_word, reassociation_graph, reverse, shift_constant, sign_consistent,
                            words_of_diagram)
from harmweb.webtrace import Color, extract_web

from oracles import brute_noncrossing, fuss_catalan


@pytest.mark.parametrize("m,count", [(1, 1), (3, 5), (5, 42)])
def test_matching_examples(m, count):
    assert len(noncrossing_matchings(m)) == count


@pytest.mark.parametrize("m", range(1, 7))
def test_matchings_against_brute_force(m):
    assert len(noncrossing_matchings(m)) == brute_noncrossing(m) == catalan(m)


@pytest.mark.parametrize("n", range(1, 6))
def test_generic_count(n):
    ds = enumerate_generic(n)
    assert len(ds) == fuss_catalan(n)
    assert len({canonical_form(d) for d in ds}) == len(ds)


@pytest.mark.parametrize("n", range(1, 5))
def test_enumerated_restrictions_are_matchings(n):
    catalog = {m.pairs for m in noncrossing_matchings(n)}
    for d in enumerate_generic(n):
        assert is_generic(d)
        for c in Color:
            chords = single_color_forest(d, c).chords()
            assert len(chords) == n and frozenset(chords) in {frozenset(p) for p in catalog}


@pytest.mark.parametrize("n", range(2, 5))
def test_sampled_diagrams_are_enumerated(n):
    known = {canonical_form(d) for d in enumerate_generic(n)}
    rng = np.random.default_rng(77 + n)
    seen = 0
    for _ in range(100):
        try:
            d = web_to_diagram(extract_web(random_monic(rng, n)))
        except NumericalError:
            continue
        if is_generic(d):
            seen += 1
            assert canonical_form(d) in known
    assert seen > 90


def test_maximal_parenthesizations():
    letters = "abcdefgh"
    for n in range(1, 9):
        assert len(maximal_parenthesizations(letters[:n])) == catalan(n - 1)


def test_base_diagram():
    d = base_diagram(2)
    assert is_generic(d)
    w = forest_to_word(base_diagram(5))
    assert str(w) == "abcde" and w.pairs == 0
    for n in range(1, 5):
        assert forest_to_word(base_diagram(n)).pairs == 0
        assert sign_consistent(base_diagram(n))


def test_merge_words():
    st_ = realize_word("abcde")
    st_.merge("a", "b")
    assert str(st_.word()) == "(ab)cde"
    st_.merge("ab", "c")
    w = st_.word()
    assert str(w) == "((ab)c)de"
    assert w.pairs == 2
    assert w.multiplicity((0, 3)) == 3
    assert forest_to_word(st_) == w
    # the bare diagram forgets which pair merged first
    with pytest.raises(DiagramError, match=r"\(\(ab\)c\)de, \(a\(bc\)\)de"):
        forest_to_word(st_.diagram())
    assert forest_to_word(realize_word("(ab)cde").diagram()) == parse_word("(ab)cde")


def test_word_parsing():
    w = parse_word("((ab)c)de")
    assert str(w) == "((ab)c)de" and w.letters == tuple("abcde")
    for bad in ["(ab", "a)b", "aa", "()"]:
        with pytest.raises(UsageError):
            parse_word(bad)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_realized_words_read_back(data):
    n = data.draw(st.integers(2, 5))
    words = all_words("abcde"[:n])
    w = data.draw(st.sampled_from(words))
    d = realize_word(w).diagram()
    assert w in words_of_diagram(d)
    # one critical node per pair of parentheses
    assert sum(1 for k in d.node_kinds() if k.value == "CRITICAL") == w.pairs


def test_pentagon():
    rep = reassociation_graph(4)
    assert len(rep.vertices) == 5 and len(rep.edges) == 5
    assert rep.is_cycle and rep.realized
    assert pentagon_check()


P2 = "z^2 + 0.3i z + (0.2 - 0.5i)"


def test_dissipation_degree_two():
    P = parse_polynomial(P2)
    Q, ev = dissipate(P, "ab")
    assert ev.letters == ("a", "b") and ev.color is Color.IM
    # the wall has IM critical value zero and one critical node joining the two curves
    assert abs((-1j * ev.wall(ev.critical_point)).real) < 1e-12
    wall = web_to_diagram(extract_web(ev.wall))
    assert single_color_forest(wall, Color.IM).nodes == (4,)
    assert canonical_form(wall) == canonical_form(web_to_diagram(sign_grid_oracle(ev.wall)))
    # past the wall the traced and grid diagrams agree on the new stratum
    d = diagram_of(Q)
    assert is_generic(d) and canonical_form(d) == ev.new_code != ev.old_code
    assert canonical_form(web_to_diagram(sign_grid_oracle(Q))) == ev.new_code
    # one more pair of parentheses at the wall, letters in boundary order
    assert ev.word_at_wall.pairs == ev.word_before.pairs + 1
    assert ev.word_at_wall.letters == ev.word_before.letters


def test_dissipation_round_trip():
    P = parse_polynomial(P2)
    Q, ev = dissipate(P, "ab")
    back = reverse(Q, ev)
    assert np.allclose(back.full, P.full)
    assert canonical_form(diagram_of(back)) == ev.old_code


@pytest.mark.parametrize("eps", [1e-7, 1e-9, -1e-9])
def test_near_wall_is_refused(eps):
    P = parse_polynomial(P2)
    _, ev = dissipate(P, "ab")
    with pytest.raises(NonGenericError):
        extract_web(shift_constant(P, ev.color, ev.wall_parameter + eps))


def test_dissipation_rejects_bad_targets():
    P = parse_polynomial(P2)
    with pytest.raises(UsageError):
        dissipate(P, "ac")
    with pytest.raises(UsageError):
        dissipate(P, "ab", eps=0)
    with pytest.raises(UsageError):
        dissipate(parse_polynomial("z^2 - 1"), "ab")
