import io

import networkx as nx
import numpy as np
import pytest

from fbsim import *
from conftest import random_graphs


def brute_force_bridges(g: Graph) -> float:
    projection = g.to_networkx()
    components = nx.number_connected_components(projection)
    bridges = 0
    for edge in list(projection.edges()):
        projection.remove_edge(*edge)
        if nx.number_connected_components(projection) > components:
            bridges += 1
        projection.add_edge(*edge)
    return bridges / projection.number_of_edges()


def test_load_two_cycle():
    g = load_edge_list(b"a\tb\nb\ta\n")
    assert g.node_count == 2
    assert g.edge_count == 2
    assert g.labels == ('a', 'b')


def test_load_collapses_duplicates():
    g = load_edge_list(b"a\tb\na\tb\n")
    assert g.edge_count == 1


def test_load_skips_comments_and_blank_lines():
    g = load_edge_list(b"# citations\n\nx\ty\r\n  \n# done\ny\tz\n")
    assert g.labels == ('x', 'y', 'z')
    assert g.edge_count == 2


def test_load_text_stream():
    g = load_edge_list(io.StringIO("1\t2\n2\t3\n"), directed=False)
    assert not g.directed
    assert g.edge_count == 2
    assert g.has_edge(1, 0)


def test_load_rejects_singletons():
    with pytest.raises(EdgeListParseException) as info:
        load_edge_list(b"a\tb\nlonely\n")
    assert info.value.line_number == 2
    assert "line 2" in str(info.value)


def test_load_rejects_malformed_lines():
    with pytest.raises(EdgeListParseException):
        load_edge_list(b"a\tb\tc\n")
    with pytest.raises(EdgeListParseException):
        load_edge_list(b"a b\n")


def test_load_rejects_invalid_utf8():
    with pytest.raises(EdgeListParseException) as info:
        load_edge_list(b"a\tb\nb\t\xff\xfe\n")
    assert info.value.line_number == 2
    assert "utf-8" in str(info.value)


def test_load_empty():
    with pytest.raises(EmptyGraphException, match="empty graph"):
        load_edge_list(b"")
    with pytest.raises(EmptyGraphException):
        load_edge_list(b"# nothing here\n\n")


def test_load_wrong_type():
    with pytest.raises(TypeError):
        load_edge_list("a\tb\n")


def test_example_counts(example):
    g, _ = example
    assert g.node_count == 14
    assert g.edge_count == 15
    G = g.node_id('G')
    assert out_degree(g, G) == 4
    assert in_degree(g, G) == 0
    assert avg_degree(g) == pytest.approx(30 / 14)


def test_example_file_counts(example):
    g, _ = example
    stream = io.BytesIO()
    write_edge_list(g, stream)
    loaded = load_edge_list(stream.getvalue())
    assert loaded.node_count == 14
    assert loaded.edge_count == 15


def test_degrees_of_two_cycle(two_cycle):
    for u in range(2):
        assert out_degree(two_cycle, u) == 1
        assert in_degree(two_cycle, u) == 1


def test_degree_errors(two_cycle):
    with pytest.raises(IndexError):
        out_degree(two_cycle, 2)
    with pytest.raises(IndexError):
        in_degree(two_cycle, -1)
    with pytest.raises(TypeError):
        out_degree(two_cycle, "0")


def test_constructor_errors():
    with pytest.raises(IndexError):
        Graph(2, [(0, 2)])
    with pytest.raises(ValueError):
        Graph(2, [(0, 1)], node_labels=['a'])
    with pytest.raises(ValueError):
        Graph(2, [(0, 1)], node_labels=['a', 'a'])
    with pytest.raises(TypeError):
        Graph(2.0, [(0, 1)])


def test_self_loops_are_kept():
    g = Graph(2, [(0, 0), (0, 1)], directed=False)
    assert g.edge_count == 2
    assert g.has_edge(0, 0)
    assert list(g.neighbors(0)) == [1]


def test_transpose_consistency():
    for g in random_graphs(30, seed=1):
        assert (g.out_adjacency.T != g.in_adjacency).nnz == 0
        for u, v in g.edges():
            assert u in g.predecessors(v)
            assert v in g.successors(u)


def test_undirected_adjacencies_are_symmetric():
    for g in random_graphs(10, seed=2, directed=False):
        assert (g.out_adjacency != g.out_adjacency.T).nnz == 0
        assert (g.out_adjacency != g.in_adjacency).nnz == 0


def test_reverse_undirected_triangle():
    g = Graph(3, [(0, 1), (1, 2), (2, 0)], directed=False)
    assert reverse(g) is g
    assert reverse(g) == g


def test_reverse_is_an_involution():
    for g in random_graphs(20, seed=3):
        flipped = reverse(g)
        assert reverse(flipped) == g
        assert sorted(flipped.edges()) == sorted((v, u) for u, v in g.edges())


def test_reverse_example(example):
    g, _ = example
    flipped = reverse(g)
    H = g.node_id('H')
    assert out_degree(flipped, H) == 4
    assert {flipped.label(v) for v in flipped.successors(H)} == {'G', 'L', 'M', 'N'}


def test_bridge_fraction_path_and_cycle():
    path = Graph(4, [(0, 1), (1, 2), (2, 3)], directed=False)
    cycle = Graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)], directed=False)
    assert bridge_fraction(path) == 1.0
    assert bridge_fraction(cycle) == 0.0


def test_bridge_fraction_example(example):
    g, _ = example
    assert bridge_fraction(g) == pytest.approx(10 / 15)
    assert bridge_fraction(g) == pytest.approx(brute_force_bridges(g))


def test_bridge_fraction_matches_removal_oracle():
    rng = np.random.default_rng(4)
    checked = 0
    while checked < 25:
        g = random_graphs(1, seed=int(rng.integers(1 << 30)), max_nodes=10, density=0.3)[0]
        projection_edges = g.to_networkx().number_of_edges()
        if projection_edges == 0 or projection_edges > 50:
            continue
        assert bridge_fraction(g) == pytest.approx(brute_force_bridges(g))
        checked += 1


def test_bridge_fraction_undefined():
    with pytest.raises(UndefinedStatisticException):
        bridge_fraction(Graph(3, []))
    with pytest.raises(UndefinedStatisticException):
        bridge_fraction(Graph(1, [(0, 0)]))


def test_avg_degree():
    assert avg_degree(Graph(2, [(0, 1), (1, 0)])) == 2.0
    assert avg_degree(Graph(3, [(0, 1), (1, 2), (2, 0)], directed=False)) == 2.0
    with pytest.raises(UndefinedStatisticException):
        avg_degree(Graph(0, []))


def test_round_trip():
    rng = np.random.default_rng(5)
    for directed in (True, False):
        for _ in range(10):
            names = ["n{}".format(i) for i in rng.permutation(12)]
            lines = ["{}\t{}".format(names[a], names[b]) for a, b in rng.integers(0, 12, size=(20, 2))]
            g = load_edge_list("\n".join(lines).encode(), directed=directed)
            stream = io.StringIO()
            write_edge_list(g, stream)
            assert load_edge_list(stream.getvalue().encode(), directed=directed) == g


def test_write_example(example):
    g, _ = example
    stream = io.BytesIO()
    write_edge_list(g, stream)
    text = stream.getvalue().decode()
    assert len(text.splitlines()) == 15
    reloaded = load_edge_list(stream.getvalue())
    assert sorted((reloaded.label(u), reloaded.label(v)) for u, v in reloaded.edges()) == \
        sorted((g.label(u), g.label(v)) for u, v in g.edges())


def test_open_graph(tmp_path):
    path = tmp_path / "graph.tsv"
    path.write_bytes(b"a\tb\nb\tc\n")
    g = open_graph(str(path), directed=False)
    assert g.node_count == 3
    assert not g.directed


def test_node_id_suggestions(example):
    g, _ = example
    assert g.node_id('D') == 3
    with pytest.raises(NodeNotFoundException) as info:
        Graph(3, [(0, 1)], node_labels=['alpha', 'beta', 'gamma']).node_id('alpah')
    assert 'alpha' in info.value.suggestions
    assert "did you mean" in str(info.value)


def test_subgraph(example):
    g, _ = example
    ids = [g.node_id(label) for label in "GDEF"]
    sub, kept = g.subgraph(ids)
    assert list(kept) == sorted(ids)
    assert sub.labels == ('D', 'E', 'F', 'G')
    assert sub.edge_count == 5
    assert sub.has_edge(sub.node_id('G'), sub.node_id('D'))


def test_graph_stats(example):
    g, _ = example
    stats = graph_stats(g)
    assert stats.node_count == 14
    assert stats.edge_count == 15
    assert stats.to_text().startswith("node_count=14 edge_count=15 avg_degree=2.142857")
    assert '"bridge_fraction"' in stats.to_json()
    assert 'modularity' not in stats.to_dict()
