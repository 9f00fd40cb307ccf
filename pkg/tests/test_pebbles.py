import itertools

import pytest
from hypothesis import given, settings, strategies as st

from pebblegraph.pebbles import (
    ORACLE_MAX_NODES,
    apply_moves,
    enumerate_signatures,
    reachable_oracle,
    signature_of,
    solve_pebble_problem,
)
from pebblegraph.rpg import Rpg

A, B, C, D, E = range(5)


def graph(n, edges):
    return Rpg.from_edges(0, range(n), edges)


def test_signature_single_component():
    g = graph(4, [(0, 1), (1, 2), (2, 3)])
    assert signature_of(g, {0, 3}) == (2,)


def test_signature_counts_per_component():
    g = graph(5, [(A, B), (C, D), (D, E)])
    assert signature_of(g, {A, C, D}) == (1, 2)
    assert signature_of(g, set()) == (0, 0)
    with pytest.raises(KeyError):
        signature_of(g, {9})


def test_enumerate_signatures():
    assert enumerate_signatures(graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)]), 3) == [(3,)]
    two_three = graph(5, [(A, B), (C, D), (D, E)])
    assert sorted(enumerate_signatures(two_three, 3)) == [(0, 3), (1, 2), (2, 1)]
    assert enumerate_signatures(graph(2, []), 3) == []


def brute_signatures(g, k):
    return sorted({signature_of(g, s) for s in itertools.combinations(sorted(g.nodes), k)})


@settings(max_examples=60)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
                        .filter(lambda e: e[0] != e[1])), st.integers(0, n))))
def test_enumerate_matches_brute_force(args):
    n, edges, k = args
    g = graph(n, edges)
    assert sorted(enumerate_signatures(g, k)) == brute_signatures(g, k)


def test_identity_is_empty_sequence():
    g = graph(3, [(0, 1), (1, 2)])
    assert solve_pebble_problem(g, {0, 2}, {0, 2}) == []


def test_path_graph():
    g = graph(3, [(A, B), (B, C)])
    moves = solve_pebble_problem(g, {A}, {C})
    assert [(m.source, m.target) for m in moves] == [(A, B), (B, C)]
    assert apply_moves({A}, moves) == {C}


def test_mismatched_counts_infeasible():
    g = graph(4, [(0, 1), (2, 3)])
    assert solve_pebble_problem(g, {0, 1}, {0, 2}) is None
    assert not reachable_oracle(g, {0, 1}, {0, 2})


def test_different_sizes_infeasible():
    g = graph(3, [(0, 1), (1, 2)])
    assert solve_pebble_problem(g, {0}, {0, 1}) is None


def test_full_component_is_fixed():
    g = graph(3, [(0, 1)])
    assert solve_pebble_problem(g, {0, 1}, {0, 1}) == []
    assert reachable_oracle(g, {0, 1, 2}, {0, 1, 2})


def test_oracle_size_bound():
    big = graph(ORACLE_MAX_NODES + 1, [])
    with pytest.raises(ValueError):
        reachable_oracle(big, {0}, {1})


def test_oracle_identity():
    assert reachable_oracle(graph(2, []), {0}, {0})


def test_apply_moves_rejects_illegal():
    g = graph(3, [(0, 1), (1, 2)])
    moves = solve_pebble_problem(g, {0}, {2})
    with pytest.raises(ValueError):
        apply_moves({1}, moves)


small_graphs = st.integers(1, 8).flatmap(lambda n: st.tuples(
    st.just(n),
    st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1])),
    st.integers(0, min(n, 4)).flatmap(lambda k: st.tuples(
        st.sets(st.integers(0, n - 1), min_size=k, max_size=k),
        st.sets(st.integers(0, n - 1), min_size=k, max_size=k)))))


@settings(max_examples=300)
@given(small_graphs)
def test_solver_agrees_with_oracle(args):
    n, edges, (start, goal) = args
    g = graph(n, edges)
    moves = solve_pebble_problem(g, start, goal)
    assert (moves is not None) == reachable_oracle(g, start, goal)
    if moves is not None:
        assert apply_moves(start, moves) == goal
        occ = set(start)
        for m in moves:
            assert (min(m.source, m.target), max(m.source, m.target)) in g.edges
            assert m.target not in occ
            # a legal move never changes the signature
            before = signature_of(g, occ)
            occ = (occ - {m.source}) | {m.target}
            assert signature_of(g, occ) == before
