import random

import pytest
from hypothesis import given, settings, strategies as st

from harmweb import orbitgrpd as og
from harmweb.errors import PreconditionError, UsageError

from oracles import gf2_cycle_space_dim


def base_points(X):
    return [c[0] for c in X.components()]


def test_rank_examples():
    C6 = og.cycle_graph(6)
    assert og.pi1_presentation(C6, [0]).rank == 1
    tree = og.FiniteGraph.from_edges([(0, 1), (1, 2), (1, 3), (3, 4)])
    assert og.pi1_presentation(tree, [0]).rank == 0
    wedge = og.FiniteGraph.from_edges([("a", "b")] * 4)
    pres = og.pi1_presentation(wedge, ["a"])
    assert pres.rank == 3 and len(pres.tree) == 1


def test_groupoid_with_several_objects():
    X = og.cycle_graph(6)
    pres = og.pi1_presentation(X, [0, 3, 3])
    assert pres.objects == (0, 3) and pres.bases == (0,)
    assert pres.rank == 1


def test_missing_base_point_refused():
    X = og.FiniteGraph.from_edges([(0, 1), (2, 3)])
    with pytest.raises(PreconditionError):
        og.pi1_presentation(X, [0])
    with pytest.raises(UsageError):
        og.pi1_presentation(X, [9])


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 9))
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=16))
    return og.FiniteGraph.from_edges(edges, range(n))


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_rank_matches_gf2_cycle_space(X):
    # self-loops are cycles over GF(2) too
    assert og.pi1_presentation(X, base_points(X)).rank == gf2_cycle_space_dim(X) == og.cycle_rank(X)


def test_quotient_examples():
    X, act = og.cycle_graph(6), og.rotation_action(6, 2)
    Y = og.quotient_graph(X, act)
    assert (Y.V, Y.E) == (2, 2)
    X, act = og.two_triangles()
    Y = og.quotient_graph(X, act)
    assert (Y.V, Y.E) == (3, 3) and len(Y.components()) == 1


@pytest.mark.parametrize("make", [lambda: (og.cycle_graph(6), og.rotation_action(6, 2)), og.two_triangles])
def test_orbit_groupoid_hand_examples(make):
    X, act = make()
    rep = og.orbit_groupoid_check(X, act)
    assert rep and rep.quotient_ranks == rep.orbit_ranks == (1,)
    assert all(rep.surjective)


def test_random_free_actions():
    rng = random.Random(11)
    for _ in range(120):
        X, act, name = og.random_free_action(rng)
        assert act.is_free(), name
        G = act.order
        Y = og.quotient_graph(X, act)
        # Euler characteristic is multiplicative for free actions
        assert X.euler_characteristic() == G * Y.euler_characteristic()
        assert X.V <= 30 and G <= 6
        assert og.orbit_groupoid_check(X, act)
        if len(X.components()) == 1:
            rX = og.pi1_presentation(X, base_points(X)).rank
            rY = og.pi1_presentation(Y, base_points(Y)).rank
            # Schreier index formula
            assert rX - 1 == G * (rY - 1)


def test_group_sizes():
    assert {og._regular(nm).__len__() for nm in og._SMALL_GROUPS} == {1, 2, 3, 4, 5, 6}
    S3 = og._regular("S3")
    # non-abelian: some pair fails to commute
    comp = lambda p, q: tuple(p[i] for i in q)  # noqa: E731
    assert any(comp(a, b) != comp(b, a) for a in S3 for b in S3)


def test_non_free_refused():
    X, act = og.fixed_vertex_example()
    assert not act.is_free()
    with pytest.raises(PreconditionError) as exc:
        og.quotient_graph(X, act)
    assert exc.value.witness["which"] == "v"
    with pytest.raises(PreconditionError):
        og.orbit_groupoid_check(X, act)


def test_incompatible_action_rejected():
    X = og.cycle_graph(4)
    with pytest.raises(UsageError):
        og.GroupActionOnGraph.from_vertex_maps(X, [{0: 1, 1: 0}])


def test_van_kampen_circle():
    X = og.cycle_graph(6)
    res = og.van_kampen_pushout(X, [0, 1, 2], [3, 4, 5], A=[0, 3])
    assert (res.rank_1, res.rank_2, res.rank_0) == (0, 0, 0)
    assert res.correction == 1 and res.rank_direct == 1
    assert res.agrees and res.presentation.rank == 1


def test_van_kampen_theta():
    # two vertices 0, 1 joined by a central edge and two paths
    X = og.FiniteGraph.from_edges([(0, 1), (0, 2), (2, 1), (0, 3), (3, 1)])
    res = og.van_kampen_pushout(X, [0, 1, 2], [0, 3, 4], A=[0])
    assert (res.rank_1, res.rank_2, res.rank_0, res.correction) == (1, 1, 0, 0)
    assert res.agrees and res.presentation.rank == 2 == X.E - X.V + 1


def test_van_kampen_disconnected_intersection():
    # two triangles joined by two bridges; both pieces hold the bridges, so they meet in two components
    X = og.FiniteGraph.from_edges([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3), (0, 5)])
    E1 = [0, 1, 2, 3, 7]
    E2 = [3, 4, 5, 6, 7]
    res = og.van_kampen_pushout(X, E1, E2, A=[0, 2, 3, 5])
    assert res.agrees
    assert res.correction == 1
    assert res.presentation.rank == gf2_cycle_space_dim(X)


def test_van_kampen_requires_cover():
    X = og.cycle_graph(4)
    with pytest.raises(PreconditionError):
        og.van_kampen_pushout(X, [0], [1, 2], A=[0])


@settings(max_examples=100, deadline=None)
@given(graphs(), st.data())
def test_van_kampen_random_splittings(X, data):
    side = [data.draw(st.sampled_from([1, 2, 3])) for _ in range(X.E)]
    E1 = [k for k, s in enumerate(side) if s & 1]
    E2 = [k for k, s in enumerate(side) if s & 2]
    used = {x for e in X.edges for x in e}
    iso = [v for v in X.vertices if v not in used]
    A = list(X.vertices)
    res = og.van_kampen_pushout(X, E1, E2, A, V1=iso)
    assert res.agrees
    assert res.rank_direct == gf2_cycle_space_dim(X)


def test_clubsuit_free():
    X, act = og.cycle_graph(6), og.rotation_action(6, 2)
    rep = og.check_clubsuit(X, act)
    assert rep.free and rep.lifting and rep.stabilizer_relates
    assert rep.homotopy_pairs > 0
    assert "discrete shadow" in str(rep)
    rng = random.Random(5)
    for _ in range(30):
        X, act, _ = og.random_free_action(rng)
        rep = og.check_clubsuit(X, act, walks=10)
        assert rep.lifting and rep.stabilizer_relates


def test_clubsuit_trivial_group():
    X = og.FiniteGraph.from_edges([(0, 1), (1, 2), (2, 0), (2, 3)])
    act = og.GroupActionOnGraph.from_vertex_maps(X, [{}])
    assert act.order == 1
    rep = og.check_clubsuit(X, act)
    assert rep.free and rep.lifting and rep.stabilizer_relates


def test_clubsuit_fixed_vertex():
    X, act = og.fixed_vertex_example()
    rep = og.check_clubsuit(X, act, walks=40)
    assert not rep.free
    assert rep.lifting and rep.homotopy_pairs > 0
    # the stabiliser of v swaps the two lifts of a walk from v; reported as measured
    assert rep.stabilizer_relates is False


def test_file_formats():
    text = "# a hexagon\n0 1\n1 2\n2 3\n3 4\n4 5\n5 0\n9\n"
    X = og.parse_graph(text)
    assert X.V == 7 and X.E == 6
    assert og.parse_graph(og.format_graph(X)).edges == X.edges
    act = og.parse_action("0:2 1:3 2:4 3:5 4:0 5:1\n", X)
    assert act.order == 3
    with pytest.raises(UsageError):
        og.parse_graph("0 1 2\n")
    with pytest.raises(UsageError):
        og.parse_action("0-1\n", X)
    with pytest.raises(UsageError):
        og.parse_action("0:1\n", X)
