import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from harmweb.diagram import (canonical_form, degree1_diagram, dumps, from_graph, is_generic, loads,
                             parse_code, real_locus_diagram, single_color_forest, to_dict, web_to_diagram)
from harmweb.errors import DiagramError
from harmweb.gridweb import sign_grid_oracle
from harmweb.poly import MonicPolynomial, parse_polynomial, random_real_rooted
from harmweb.strata import enumerate_generic
from harmweb.webtrace import Color, NodeKind, extract_web


def traced(text):
    return web_to_diagram(extract_web(parse_polynomial(text)))


def test_degree_one_diagram():
    d = traced("z - 0.2 + 0.4i")
    assert d.num_leaves == 4
    assert [nd.kind for nd in d.nodes] == [NodeKind.ROOT] and d.nodes[0].valency == 4
    assert sorted(e.color.value for e in d.edges) == ["IM", "IM", "RE", "RE"]
    assert canonical_form(d) == canonical_form(degree1_diagram())
    code = canonical_form(d)
    assert canonical_form(parse_code(code)) == code


def test_real_roots_give_real_locus_diagram(rng):
    for n in range(1, 6):
        d = web_to_diagram(extract_web(random_real_rooted(rng, n)))
        assert canonical_form(d) == canonical_form(real_locus_diagram(n))


def test_z2_minus_1_diagram():
    d = traced("z^2 - 1")
    assert d.num_leaves == 8
    kinds = sorted(k.value for k in d.node_kinds())
    assert kinds == ["CRITICAL", "ROOT", "ROOT"]
    assert not is_generic(d)
    f = single_color_forest(d, Color.IM)
    assert f.nodes == (4,)
    assert len(f.edges) == 4 and all(("node", 0) in e for e in f.edges)
    # agrees with the independent grid extractor
    assert canonical_form(d) == canonical_form(web_to_diagram(sign_grid_oracle(parse_polynomial("z^2 - 1"))))


def test_rotated_roots_change_the_code():
    assert canonical_form(traced("z^2 - 1")) != canonical_form(traced("z^2 + 1"))


def test_is_generic_examples():
    assert is_generic(degree1_diagram())
    assert is_generic(traced("z + 0.7i"))
    # z^2 - z has real roots 0 and 1, so its web is the real-locus pattern
    assert canonical_form(traced("z^2 - z")) == canonical_form(real_locus_diagram(2))


def test_single_color_forest_examples():
    for c in Color:
        f = single_color_forest(degree1_diagram(), c)
        assert f.is_matching() and len(f.chords()) == 1
    for n in range(1, 6):
        f = single_color_forest(real_locus_diagram(n), Color.RE)
        assert f.is_matching() and len(f.chords()) == n


def test_interchange_round_trip_fields():
    d = traced("z^3 + (0.3+0.2i)z - 0.5")
    obj = json.loads(dumps(d))
    assert list(obj)[:4] == ["n", "leaves", "nodes", "edges"]
    assert obj["n"] == 3 and len(obj["leaves"]) == 12
    assert obj["leaves"][1] == {"index": 1, "color": "RE"}
    assert set(obj["nodes"][0]) == {"id", "kind", "cyclic"}
    assert set(obj["edges"][0]) == {"id", "color", "ends"}
    assert canonical_form(loads(dumps(d))) == canonical_form(d)
    assert dumps(loads(dumps(d))) == dumps(d)
    assert to_dict(d) == to_dict(loads(dumps(d)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_round_trip_enumerated(n):
    for d in enumerate_generic(n):
        code = canonical_form(d)
        assert canonical_form(loads(dumps(d))) == code
        assert canonical_form(parse_code(code)) == code


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_generic_edge_counts(n):
    for d in enumerate_generic(n):
        assert len(d.nodes) == n and len(d.edges) == 4 * n
        for c in Color:
            f = single_color_forest(d, c)
            assert f.is_matching() and len(f.chords()) == n


def test_validation_rejects_cycle():
    # two RE edges between the same pair of nodes close a loop
    with pytest.raises(DiagramError):
        from_graph(1, [NodeKind.ROOT, NodeKind.ROOT], [
            (Color.IM, ("leaf", 0), ("node", 0)), (Color.RE, ("node", 0), ("node", 1)),
            (Color.RE, ("node", 0), ("node", 1)), (Color.IM, ("node", 1), ("leaf", 2)),
            (Color.RE, ("leaf", 1), ("leaf", 3))])


def test_validation_rejects_color_mismatch():
    with pytest.raises(DiagramError):
        from_graph(1, [NodeKind.ROOT], [
            (Color.RE, ("leaf", 0), ("node", 0)), (Color.RE, ("leaf", 1), ("node", 0)),
            (Color.IM, ("leaf", 2), ("node", 0)), (Color.RE, ("leaf", 3), ("node", 0))])


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10_000))
def test_code_ignores_input_order(n, seed):
    # relabelling nodes and edges internally never changes the code
    rng = np.random.default_rng(seed)
    ds = enumerate_generic(n)
    d = ds[int(rng.integers(len(ds)))]
    perm = rng.permutation(len(d.nodes))
    inv = {int(p): i for i, p in enumerate(perm)}
    kinds = [d.nodes[int(p)].kind for p in perm]
    edges = []
    for e in d.edges:
        ends = tuple(r if r[0] == "leaf" else ("node", inv[r[1]]) for r in e.ends)
        edges.append((e.color, *ends))
    order = rng.permutation(len(edges))
    d2 = from_graph(n, kinds, [edges[int(i)] for i in order])
    assert canonical_form(d2) == canonical_form(d)
