import random

import pytest
from hypothesis import given, settings, strategies as st

from morseflow.graph import (
    ClassKind, DirectedGraph, GraphError, admissible_paths, admissible_words, communicating_classes,
    invariant_class_exists, shortest_path, to_dot, validate_n_graph,
)
from oracles import brute_classes, is_n_graph


def as_set(classes):
    return {(c.members, c.kind is ClassKind.INVARIANT) for c in classes}


def test_degree_report_cycle():
    g = DirectedGraph.from_edges(2, [(0, 1), (1, 0)])
    rep = validate_n_graph(g)
    assert rep.is_n_graph
    assert rep.out_degrees == (1, 1) and rep.in_degrees == (1, 1)


def test_single_self_loop_is_n_graph():
    assert validate_n_graph(DirectedGraph.from_edges(1, [(0, 0)])).is_n_graph


def test_dangling_edge_is_not_n_graph():
    rep = validate_n_graph(DirectedGraph.from_edges(2, [(0, 1)]))
    assert not rep.is_n_graph
    assert rep.out_degrees[1] == 0 and rep.in_degrees[0] == 0


def test_rejects_bad_structure():
    with pytest.raises(GraphError):
        DirectedGraph(0)
    with pytest.raises(GraphError):
        DirectedGraph.from_edges(2, [(0, 2)])
    with pytest.raises(GraphError):
        DirectedGraph.from_edges(2, [(0, 1), (0, 1)])
    with pytest.raises(GraphError):
        communicating_classes(DirectedGraph.from_edges(2, [(0, 1)]))


def test_one_based_ingestion():
    g = DirectedGraph.from_edges(2, [(1, 2), (2, 1)], one_based=True)
    assert g.edges == {(0, 1), (1, 0)}


@pytest.mark.parametrize("edges, expected", [
    ([(0, 1), (1, 0)], {(frozenset({0, 1}), True)}),
    ([(0, 0), (0, 1), (1, 0), (1, 1)], {(frozenset({0, 1}), True)}),
    ([(0, 0), (0, 1), (1, 1)], {(frozenset({0}), False), (frozenset({1}), True)}),
])
def test_classes_small(edges, expected):
    assert as_set(communicating_classes(DirectedGraph.from_edges(2, edges))) == expected


def test_vertex_without_cycle_has_no_class():
    # 1 sits between two loops but lies on no cycle itself
    g = DirectedGraph.from_edges(3, [(0, 0), (0, 1), (1, 2), (2, 2)])
    members = [c.members for c in communicating_classes(g)]
    assert frozenset({1}) not in members
    assert sorted(map(sorted, members)) == [[0], [2]]


def test_invariant_class_examples():
    assert invariant_class_exists(DirectedGraph.from_edges(2, [(0, 1), (1, 0)])).members == {0, 1}
    assert invariant_class_exists(DirectedGraph.from_edges(2, [(0, 0), (0, 1), (1, 1)])).members == {1}


def test_admissible_paths_examples():
    two_cycle = DirectedGraph.from_edges(2, [(0, 1), (1, 0)])
    assert admissible_paths(two_cycle, 0, 0, 3) == [[0, 1, 0]]
    loop = DirectedGraph.from_edges(1, [(0, 0)])
    assert admissible_paths(loop, 0, 0, 2) == [[0, 0], [0, 0, 0]]
    one_way = DirectedGraph.from_edges(2, [(0, 1)])
    assert admissible_paths(one_way, 1, 0, 5) == []
    with pytest.raises(GraphError):
        admissible_paths(one_way, 0, 7, 2)


def test_shortest_path_requires_an_edge():
    g = DirectedGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    assert shortest_path(g, 0, 0) == [0, 1, 2, 0]
    assert shortest_path(g, 0, 2) == [0, 1, 2]
    assert shortest_path(g, 0, 2, within=frozenset({0, 2})) is None


def test_admissible_words_match_enumeration():
    g = DirectedGraph.complete(2)
    assert admissible_words(g, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    g = DirectedGraph.from_edges(2, [(0, 1), (1, 0)])
    assert admissible_words(g, 3) == [(0, 1, 0), (1, 0, 1)]


def test_dot_marks_invariant_classes():
    g = DirectedGraph.from_edges(2, [(0, 0), (0, 1), (1, 1)])
    dot = to_dot(g, communicating_classes(g))
    assert "style=bold" in dot and "style=dashed" in dot
    assert "0 -> 1;" in dot


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    pairs = [(a, b) for a in range(n) for b in range(n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    return n, edges


@settings(max_examples=300, deadline=None)
@given(graphs())
def test_classes_match_reachability_oracle(data):
    n, edges = data
    g = DirectedGraph.from_edges(n, edges)
    rep = validate_n_graph(g)
    assert sum(rep.out_degrees) == sum(rep.in_degrees) == len(edges)
    assert rep.is_n_graph == is_n_graph(n, edges)
    if not rep.is_n_graph:
        return
    classes = communicating_classes(g)
    assert as_set(classes) == brute_classes(n, edges)
    seen = set()
    for c in classes:
        assert not seen & c.members
        seen |= c.members
        if c.kind is ClassKind.INVARIANT:
            assert all(b in c.members for a in c.members for b in g.successors(a))


def test_invariant_class_on_random_n_graphs():
    rng = random.Random(7)
    found = 0
    while found < 1000:
        n = rng.randint(1, 8)
        edges = {(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(n, 3 * n))}
        if not is_n_graph(n, edges):
            continue
        found += 1
        cls = invariant_class_exists(DirectedGraph.from_edges(n, edges))
        assert (cls.members, True) in brute_classes(n, edges)
