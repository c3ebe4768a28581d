import cmath
import math

import numpy as np
import pytest

from harmweb.diagram import canonical_form, single_color_forest, web_to_diagram
from harmweb.errors import NonGenericError, UsageError
from harmweb.gridweb import sign_grid_oracle
from harmweb.poly import MonicPolynomial, parse_polynomial, random_monic, roots
from harmweb.webtrace import (Color, NodeKind, TraceParams, boundary_radius, extract_web, harmonic_value,
                              leaves, slot_color, trace_curve)

from oracles import bisect


def test_degree_one_leaves():
    lv = leaves(parse_polynomial("z"), 2.0)
    got = {(lf.color, round(lf.angle, 12)) for lf in lv}
    q = round(math.pi / 2, 12)
    assert got == {(Color.IM, 0.0), (Color.IM, round(math.pi, 12)),
                   (Color.RE, q), (Color.RE, round(3 * math.pi / 2, 12))}


def test_degree_two_leaves_alternate():
    lv = leaves(parse_polynomial("z^2 + (0.3-0.1i)z"), 3.0)
    assert len(lv) == 8
    assert [lf.color for lf in lv] == [slot_color(k) for k in range(8)]
    assert [lf.color for lf in lv] == [Color.IM, Color.RE] * 4
    angles = [lf.angle for lf in lv]
    assert angles == sorted(angles)


def test_refined_leaf_against_bisection():
    P, R = parse_polynomial("z^2 - 1"), 3.0
    lf = leaves(P, R)[1]
    want = bisect(lambda th: harmonic_value(P, Color.RE, R * cmath.exp(1j * th)), 0, math.pi / 2)
    assert abs(lf.angle - want) < 1e-12
    assert 0 < abs(lf.angle - math.pi / 4) < 1 / R ** 2


def test_trace_straight_line():
    P, R = parse_polynomial("z"), 2.0
    pts, status, _ = trace_curve(P, Color.RE, 2j, R)
    assert status == 0
    assert abs(pts[-1] + 2j) < 1e-9
    assert np.max(np.abs(pts.real)) < 1e-9


def test_trace_into_crossing():
    P = parse_polynomial("z^2")
    pts, status, hit = trace_curve(P, Color.IM, 3.0, 3.0, specials=[0j], capture=[0j])
    assert (status, hit) == (1, 0)
    assert np.max(np.abs(pts.imag)) < 1e-9
    # the continuation past the node leaves along the negative real axis
    pts, status, _ = trace_curve(P, Color.IM, -3e-3 + 0j, 3.0, direction=-1)
    assert status == 0 and abs(pts[-1] + 3) < 1e-9


def test_trace_hyperbola():
    P, R = parse_polynomial("z^2 - 1"), 3.0
    th = leaves(P, R)[1].angle
    pts, status, _ = trace_curve(P, Color.RE, R * cmath.exp(1j * th), R)
    assert status == 0
    assert abs(pts[-1] - R * cmath.exp(-1j * th)) < 1e-8
    assert np.max(np.abs(pts.real ** 2 - pts.imag ** 2 - 1)) < 1e-9
    assert np.min(pts.real) > 0.999


def test_trace_refuses_off_curve_start():
    with pytest.raises(UsageError):
        trace_curve(parse_polynomial("z"), Color.RE, 1 + 1j, 2.0)


def test_degree_one_web():
    c = 0.3 - 0.2j
    w = extract_web(MonicPolynomial((-c,)))
    assert len(w.nodes) == 1
    (node,) = w.nodes
    assert node.kind is NodeKind.ROOT and node.valency == 4
    assert abs(node.position - c) < 1e-12
    assert w.leaf_ends() == 4
    assert sorted(cv.color.value for cv in w.curves) == ["IM", "IM", "RE", "RE"]


def test_z2_minus_1_web():
    w = extract_web(parse_polynomial("z^2 - 1"))
    rootnodes = sorted((nd.position.real for nd in w.nodes if nd.kind is NodeKind.ROOT))
    assert np.allclose(rootnodes, [-1, 1], atol=1e-12)
    crit = [nd for nd in w.nodes if nd.kind is NodeKind.CRITICAL]
    assert len(crit) == 1 and abs(crit[0].position) < 1e-12 and crit[0].valency == 4
    assert set(crit[0].slot_colors) == {Color.IM}
    assert w.leaf_ends() == 8


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_cyclotomic_rotation_invariance(n):
    w = extract_web(MonicPolynomial((-1,) + (0,) * (n - 1)))
    rot = cmath.exp(2j * math.pi / n)
    tol = TraceParams().merge_tol_frac * w.radius
    pos = {nd.kind: [] for nd in w.nodes}
    for nd in w.nodes:
        pos[nd.kind].append(nd.position)
    for kind, ps in pos.items():
        for p in ps:
            assert min(abs(rot * p - q) for q in ps) < tol, kind
    # the leaf angles rotate by 4 slots
    ang = [lf.angle for lf in w.leaves]
    for k in range(4 * n):
        d = (ang[(k + 4) % (4 * n)] - ang[k] - 2 * math.pi / n) % (2 * math.pi)
        assert min(d, 2 * math.pi - d) < 1e-9


def test_trace_is_stable_under_step_size():
    rng = np.random.default_rng(3)
    for _ in range(5):
        P = random_monic(rng, 4)
        a = canonical_form(web_to_diagram(extract_web(P)))
        b = canonical_form(web_to_diagram(extract_web(P, TraceParams(h0_frac=1 / 350, hmin_frac=1 / 40000))))
        assert a == b


def test_root_nodes_match_roots(rng):
    for n in range(1, 6):
        P = random_monic(rng, n)
        w = extract_web(P)
        rn = [nd for nd in w.nodes if nd.kind is NodeKind.ROOT]
        assert len(rn) == n and sum(nd.valency // 4 for nd in rn) == n
        for r in roots(P):
            assert min(abs(nd.position - r) for nd in rn) < 1e-8
        d = web_to_diagram(w)
        for c in Color:
            f = single_color_forest(d, c)
            verts = {x for e in f.edges for x in e}
            assert len(verts) - len(f.edges) == f.components()


def test_near_degenerate_refused():
    with pytest.raises(NonGenericError):
        extract_web(MonicPolynomial.from_roots([0, 1e-5]))


def test_boundary_radius():
    P = parse_polynomial("z^2 - 1")
    assert boundary_radius(P) == 3
    with pytest.raises(UsageError):
        boundary_radius(P, TraceParams(radius=1.5))


def test_oracle_degree_one():
    w = sign_grid_oracle(parse_polynomial("z"), resolution=64)
    assert len(w.nodes) == 1 and abs(w.nodes[0].position) < 1e-9
    assert len(w.curves) == 4


@pytest.mark.parametrize("text", ["z^2 - 1", "z^3 + (1-i)z^2 - (1-i)z - 1 + i", "z^2 - z"])
def test_oracle_agrees(text):
    P = parse_polynomial(text)
    assert canonical_form(web_to_diagram(extract_web(P))) == canonical_form(web_to_diagram(sign_grid_oracle(P)))


def test_dump_sections():
    text = extract_web(parse_polynomial("z^2 - 1")).dump()
    for head in ("LEAVES", "CURVES", "NODES"):
        assert f"\n{head}\n" in text
