import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from amflood.graph import (
    Graph,
    GraphError,
    bipartition,
    complete_graph,
    cross_edges,
    cycle_graph,
    diameter,
    distances_from,
    eccentricity,
    is_bipartite,
    load_graph,
    path_graph,
    random_connected_graph,
)

from _graphs import connected_atlas, to_nx

P3 = "a b\nb c"
K3 = "a b\nb c\nc a"


def test_load_path():
    g = load_graph(P3)
    assert g.nodes == ("a", "b", "c")
    assert g.m == 2
    assert g.neighbors("b") == {"a", "c"}


def test_load_triangle():
    g = load_graph(K3)
    assert g.n == 3 and g.m == 3


def test_load_skips_comments_and_blank_lines():
    g = load_graph("# header\n\na b\n  # indented\nb c\n")
    assert g == load_graph(P3)


def test_load_single_node():
    g = load_graph("node x")
    assert g.nodes == ("x",) and g.m == 0


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("a b\nc d", "disconnected"),
        ("a a", "self-loop"),
        ("a b\nb a", "duplicate"),
        ("a b c", "line 1"),
        ("", "no nodes"),
        ("a b\nnode z", "node"),
    ],
)
def test_load_errors(text, fragment):
    with pytest.raises(GraphError, match=fragment):
        load_graph(text)


def test_edge_list_round_trip():
    g = load_graph(K3)
    assert load_graph(g.to_edge_list()) == g


def test_distances():
    assert distances_from(load_graph(K3), "a") == {"a": 0, "b": 1, "c": 1}
    assert distances_from(load_graph(P3), "a") == {"a": 0, "b": 1, "c": 2}
    c5 = cycle_graph(5)
    for v in c5.nodes:
        assert sorted(distances_from(c5, v).values()) == [0, 1, 1, 2, 2]


def test_distances_unknown_node():
    with pytest.raises(KeyError):
        distances_from(load_graph(P3), "z")


def test_eccentricity_and_diameter():
    k3, p3 = load_graph(K3), load_graph(P3)
    assert eccentricity(k3, "a") == 1 and diameter(k3) == 1
    assert eccentricity(p3, "a") == 2 and eccentricity(p3, "b") == 1
    assert diameter(p3) == 2
    assert diameter(cycle_graph(5)) == 2


def test_cross_edges_examples():
    assert cross_edges(load_graph(K3), "a") == {("b", "c")}
    assert cross_edges(load_graph(P3), "a") == set()
    c5 = cycle_graph(5)
    assert cross_edges(c5, 0) == {(2, 3)}


def test_bipartition_examples():
    assert bipartition(load_graph(P3)) == ({"a", "c"}, {"b"})
    assert bipartition(load_graph(K3)) is None
    left, right = bipartition(cycle_graph(4))
    assert {frozenset(left), frozenset(right)} == {frozenset({0, 2}), frozenset({1, 3})}


def test_metrics_agree_with_networkx_on_atlas():
    for g in connected_atlas(6):
        h = to_nx(g)
        assert diameter(g) == nx.diameter(h)
        assert is_bipartite(g) == nx.is_bipartite(h)
        for v in g.nodes:
            assert distances_from(g, v) == nx.single_source_shortest_path_length(h, v)


def test_bipartite_iff_no_cross_edges_exhaustive():
    for g in connected_atlas(6):
        no_cross = all(not cross_edges(g, v) for v in g.nodes)
        assert is_bipartite(g) == no_cross
        # one source already decides it on a connected graph
        assert is_bipartite(g) == (not cross_edges(g, g.nodes[0]))


@st.composite
def graphs(draw, max_n=9):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    p = draw(st.floats(0.0, 1.0))
    return random_connected_graph(n, random.Random(seed), p)


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_distance_symmetry_and_triangle_inequality(g):
    d = {v: distances_from(g, v) for v in g.nodes}
    for u in g.nodes:
        for v in g.nodes:
            assert d[u][v] == d[v][u]
            for w in g.nodes:
                assert d[u][w] <= d[u][v] + d[v][w]


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_diameter_vs_eccentricity(g):
    eccs = [eccentricity(g, v) for v in g.nodes]
    assert diameter(g) == max(eccs)
    for e in eccs:
        assert e <= diameter(g) <= 2 * e or g.n == 1


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_bipartition_is_a_proper_colouring(g):
    parts = bipartition(g)
    if parts is None:
        assert not nx.is_bipartite(to_nx(g))
        return
    left, right = parts
    assert left | right == set(g.nodes) and not left & right
    for e in g.edges:
        u, w = tuple(e)
        assert (u in left) != (w in left)


def test_constructors():
    assert path_graph(4).m == 3
    assert cycle_graph(6).m == 6
    assert complete_graph(5).m == 10


def test_random_connected_graph_is_deterministic():
    a = random_connected_graph(7, random.Random(3))
    b = random_connected_graph(7, random.Random(3))
    assert a == b and a.n == 7


def test_edge_endpoints_join_the_node_set():
    assert Graph(["a"], [("a", "b")]).nodes == ("a", "b")
