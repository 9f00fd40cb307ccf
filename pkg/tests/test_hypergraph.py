import numpy as np
import pytest

from pebblegraph.hypergraph import (
    Hypergraph,
    Hypernode,
    PlanningTimeout,
    add_rpg,
    answer_query,
    connect_node,
    grow_hypergraph,
    sibling_move,
)
from pebblegraph.minconflict import SegmentedPath
from pebblegraph.pebbles import signature_of
from pebblegraph.plan import replay
from pebblegraph.rpg import ConstrainedEdge, PumpedArrangement, Rpg

A, B, C, D, E, F, G = range(7)


def ce(s, t, constraints):
    return ConstrainedEdge(s, t, SegmentedPath(s, t, (), (), (), 0.0, frozenset(constraints)),
                           frozenset(constraints))


def hg(k, start=(), goal=()):
    return Hypergraph(k, frozenset(start), frozenset(goal))


def test_single_component_gives_one_hypernode():
    H = hg(2)
    nodes = add_rpg(H, Rpg.from_edges(0, {A, B, C}, [(A, B), (B, C)]), [])
    assert [n.signature for n in nodes] == [(2,)]
    assert H.edges == []


def test_two_components_give_three_hypernodes():
    H = hg(3)
    nodes = add_rpg(H, Rpg.from_edges(0, {A, B, C, D, E}, [(A, B), (C, D), (D, E)]), [])
    assert sorted(n.signature for n in nodes) == [(0, 3), (1, 2), (2, 1)]


def test_rpg_ids_unique():
    H = hg(1)
    add_rpg(H, Rpg.from_edges(0, {A, B}, [(A, B)]), [])
    with pytest.raises(ValueError):
        add_rpg(H, Rpg.from_edges(0, {C, D}, [(C, D)]), [])


def test_identical_rpgs_connect():
    H = hg(2)
    v, = add_rpg(H, Rpg.from_edges(0, {A, B, C}, [(A, B), (B, C)]), [])
    u, = add_rpg(H, Rpg.from_edges(1, {A, B, C}, [(A, B), (B, C)]), [])
    cross = [e for e in H.edges if e.kind == "cross"]
    assert len(cross) == 1
    assert cross[0].handoff == {A, B}
    assert signature_of(H.rpg_of(v), cross[0].handoff) == v.signature
    with pytest.raises(ValueError):
        connect_node(H, v, v)


def test_too_few_shared_poses():
    H = hg(3)
    add_rpg(H, Rpg.from_edges(0, {A, B, C, D}, [(A, B), (B, C), (C, D)]), [])
    add_rpg(H, Rpg.from_edges(1, {A, B, E, F}, [(A, B), (B, E), (E, F)]), [])
    assert H.edges == []


def test_shared_poses_that_cannot_all_be_filled():
    # left RPG holds all of A, B, C; the right one only allows one object on {B, C}
    H = hg(3)
    left, = add_rpg(H, Rpg.from_edges(0, {A, B, C, D}, [(A, B), (B, C), (C, D)]), [])
    right = Rpg.from_edges(1, {A, B, C, E}, [(A, E), (B, C)])
    H.rpgs[1] = right
    u = Hypernode(99, 1, (2, 1))
    assert connect_node(H, left, u) is None
    ok = Hypernode(100, 1, (1, 2))
    assert connect_node(H, left, ok).handoff == {A, B, C}


def test_sibling_within_one_component_ignored():
    rpg = Rpg.from_edges(0, {A, B, C}, [(A, B), (B, C)])
    assert sibling_move(rpg, (1,), ce(A, C, {B})) is None


def test_sibling_with_evacuable_constraints():
    # components {A}, {B, C, D, E}; edge A -> B blocked by C and D
    rpg = Rpg.from_edges(0, {A, B, C, D, E}, [(B, C), (C, D), (D, E)])
    H = hg(2)
    nodes = add_rpg(H, rpg, [ce(A, B, {C, D})])
    by_sig = {n.signature: n.id for n in nodes}
    sib = {(e.u, e.v): e for e in H.edges if e.kind == "sibling"}
    # both directions are feasible and each carries its own witness
    assert set(sib) == {(by_sig[(1, 1)], by_sig[(0, 2)]), (by_sig[(0, 2)], by_sig[(1, 1)])}
    e = sib[(by_sig[(1, 1)], by_sig[(0, 2)])]
    assert e.edge.pair == (A, B)
    assert A in e.pre and not e.pre & {B, C, D}
    assert e.post == (e.pre - {A}) | {B}
    back = sib[(by_sig[(0, 2)], by_sig[(1, 1)])]
    assert back.edge.pair == (B, A) and B in back.pre and not back.pre & {A, C, D}


def test_sibling_blocked_when_constraint_cannot_be_emptied():
    # components {A}, {B, C, D}: with two objects in the big component, D cannot be emptied
    rpg = Rpg.from_edges(0, {A, B, C, D}, [(B, C), (C, D)])
    assert sibling_move(rpg, (1, 2), ce(A, B, {C, D})) is None
    assert sibling_move(rpg, (1, 1), ce(A, B, {C, D})) is None
    assert sibling_move(rpg, (1, 0), ce(A, B, {C, D})) is not None


def test_start_equals_goal_connects_immediately(shelf, shelf_rm):
    sc = shelf.with_problem({0, 2}, {0, 2})
    H = grow_hypergraph(sc, shelf_rm, 2, 1, rng=0)
    assert H.iterations == 0 and H.start_ids & H.goal_ids


def test_open_problem_solves(shelf, shelf_rm):
    sc = shelf.with_problem({4, 5}, {1, 3})
    H = grow_hypergraph(sc, shelf_rm, 2, 2, rng=np.random.default_rng(3), time_budget=20)
    plan = answer_query(H, shelf_rm)
    assert replay(sc, plan).ok
    assert len(H.rpgs) <= 4


def test_sealed_goal_times_out(sealed):
    from pebblegraph.roadmap import build_roadmap
    rm = build_roadmap(sealed, seed=0)
    with pytest.raises(PlanningTimeout) as info:
        grow_hypergraph(sealed, rm, 1, 1, rng=0, time_budget=0.5)
    assert info.value.hypergraph.nodes


def test_forced_k_plus_one_rpg(shelf, shelf_rm):
    sc = shelf.with_problem({1, 2}, {1, 4})
    pumped = PumpedArrangement(frozenset({1, 2, 4}), 2, 1)
    H = grow_hypergraph(sc, shelf_rm, 2, 1, rng=0, start_pumped=pumped)
    nodes, edges = H.find_path()
    assert len(nodes) == 1 and edges == []
    assert replay(sc, answer_query(H, shelf_rm)).ok


def test_hyperedge_soundness(nonmonotone, nonmonotone_rm):
    H = grow_hypergraph(nonmonotone, nonmonotone_rm, 4, 2, rng=0, time_budget=60)
    for e in H.edges:
        if e.kind == "cross":
            assert len(e.handoff) == H.k
            for n in (e.u, e.v):
                assert signature_of(H.rpg_of(n), e.handoff) == H.nodes[n].signature
        else:
            c = e.edge
            assert c.source in e.pre and c.target not in e.pre and not e.pre & c.constraints
            assert signature_of(H.rpg_of(e.u), e.pre) == H.nodes[e.u].signature
            assert signature_of(H.rpg_of(e.v), e.post) == H.nodes[e.v].signature
    assert replay(nonmonotone, answer_query(H, nonmonotone_rm)).ok


def test_query_without_connection_fails(sealed):
    H = hg(1, {0}, {1})
    with pytest.raises(ValueError):
        answer_query(H, None)
