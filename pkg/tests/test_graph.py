import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netstab import graph as G
from netstab.errors import GraphParseError, InvalidArgument


def to_nx(g):
    h = nx.DiGraph() if g.directed else nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def test_path2_adjacency():
    assert G.path(2).adj.tolist() == [[0, 1], [1, 0]]


def test_cycle3_triangle():
    g = G.cycle(3)
    assert g.edge_count == 3
    assert G.degree_profile(g).k_in == (2, 2, 2)


def test_star4_degrees():
    assert G.degree_profile(G.star(4)).k_in == (3, 1, 1, 1)


@pytest.mark.parametrize("ctor,low", [(G.path, 2), (G.star, 2), (G.cycle, 3), (G.complete, 2)])
def test_family_rejects_small_n(ctor, low):
    with pytest.raises(InvalidArgument):
        ctor(low - 1)


def test_fig3_graph():
    g = G.fig3_graph()
    assert G.degree_profile(g).k_in == (3, 2, 3, 2)
    assert G.degree_profile(g).k_out == (3, 2, 3, 2)
    assert g.edge_count == 5
    assert g.adj[0, 1] and g.adj[1, 2] and g.adj[0, 2]
    assert not G.is_bipartite(g)
    assert G.is_connected(g)


def test_fig3_not_two_colorable_exhaustive():
    g = G.fig3_graph()
    colorings = [[(mask >> i) & 1 for i in range(4)] for mask in range(16)]
    proper = [c for c in colorings if all(c[s] != c[t] for s, t in g.edges())]
    assert proper == []


def test_connectivity_examples():
    assert G.is_connected(G.path(5))
    assert not G.is_connected(G.Graph(np.zeros((2, 2)), directed=False))
    assert G.is_connected(G.from_edges(2, [(0, 1), (1, 0)], directed=True))
    # weakly but not strongly connected
    assert not G.is_connected(G.from_edges(3, [(0, 1), (1, 2)], directed=True))


def test_bipartite_examples():
    assert G.is_bipartite(G.cycle(4))
    assert not G.is_bipartite(G.cycle(5))


def test_degree_profile_examples():
    prof = G.degree_profile(G.from_edges(2, [(0, 1)], directed=True))
    assert prof.k_in == (0, 1) and prof.k_out == (1, 0)
    assert G.degree_profile(G.complete(3)).k_in == (2, 2, 2)


def test_non_positive_divergence_examples():
    assert G.is_non_positive_divergence(G.fig3_graph())
    assert not G.is_non_positive_divergence(G.from_edges(3, [(0, 1), (1, 2)], directed=True))
    assert G.is_non_positive_divergence(G.from_edges(3, [(0, 1), (1, 2), (2, 0)], directed=True))


def test_balanced_single_cycle():
    g = G.random_balanced_digraph(4, 1, seed=123)
    prof = G.degree_profile(g)
    assert g.edge_count == 4
    assert prof.k_in == prof.k_out == (1, 1, 1, 1)
    assert G.is_connected(g)


def test_balanced_seed42():
    assert G.is_non_positive_divergence(G.random_balanced_digraph(4, 3, 42))


def test_balanced_deterministic():
    assert G.random_balanced_digraph(6, 4, 9) == G.random_balanced_digraph(6, 4, 9)


def test_balanced_exhausts_when_impossible():
    # a 3-node digraph has 6 arcs; three arc-disjoint 3-cycles cannot fit
    with pytest.raises(G.ExhaustedAttempts):
        G.random_balanced_digraph(3, 4, 0)


def test_invalid_adjacency():
    with pytest.raises(InvalidArgument):
        G.Graph(np.array([[1, 0], [0, 0]]))
    with pytest.raises(InvalidArgument):
        G.Graph(np.array([[0, 2], [2, 0]]))
    with pytest.raises(InvalidArgument):
        G.Graph(np.array([[0, 1], [0, 0]]), directed=False)


def test_adjacency_is_read_only():
    g = G.cycle(3)
    with pytest.raises(ValueError):
        g.adj[0, 1] = 0


# -- text format ------------------------------------------------------------

def test_parse_directed_cycle():
    g = G.parse_graph("directed 3\n1 2\n2 3\n3 1\n")
    assert g.directed
    assert g == G.from_edges(3, [(0, 1), (1, 2), (2, 0)], directed=True)
    # edge 1 -> 2 feeds node 2
    assert g.adj[1, 0] == 1 and g.adj[0, 1] == 0


def test_parse_self_loop_error():
    with pytest.raises(GraphParseError) as exc:
        G.parse_graph("undirected 2\n1 1\n")
    assert exc.value.line == 2


@pytest.mark.parametrize("text,line", [
    ("undirected 3\n1 2\n2 1\n", 3),
    ("directed 3\n1 2\n1 2\n", 3),
    ("undirected 3\n1 4\n", 2),
    ("undirected 3\n1 x\n", 2),
    ("1 2\n", 1),
    ("# comment\nundirected 3\n1 2 3\n", 3),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(GraphParseError) as exc:
        G.parse_graph(text)
    assert exc.value.line == line


def test_canonical_round_trip():
    messy = "# fig3\nundirected 4\n3 1\n\n4 1\n2 1\n3 2\n4 3\n"
    canon = "undirected 4\n1 2\n1 3\n1 4\n2 3\n3 4\n"
    assert G.serialize_graph(G.parse_graph(messy)) == canon
    assert G.parse_graph(canon) == G.fig3_graph()


def test_parse_multiple():
    gs = G.parse_graphs(G.serialize_graphs([G.cycle(3), G.random_balanced_digraph(4, 2, 1)]))
    assert len(gs) == 2 and gs[0] == G.cycle(3) and gs[1].directed


def test_resolve_graph(tmp_path):
    assert G.resolve_graph("cycle4") == G.cycle(4)
    assert G.resolve_graph("fig3") == G.fig3_graph()
    f = tmp_path / "g.txt"
    f.write_text("undirected 2\n1 2\n")
    assert G.resolve_graph(str(f)) == G.path(2)
    with pytest.raises(InvalidArgument):
        G.resolve_graph("nonsense")


# -- properties -----------------------------------------------------------

@st.composite
def graphs(draw, directed=None):
    n = draw(st.integers(1, 7))
    d = draw(st.booleans()) if directed is None else directed
    bits = draw(st.lists(st.booleans(), min_size=n * n, max_size=n * n))
    adj = np.array(bits, dtype=np.int8).reshape(n, n)
    np.fill_diagonal(adj, 0)
    if not d:
        adj = np.triu(adj, 1)
        adj = adj + adj.T
    return G.Graph(adj, directed=d)


def _check_invariants(g):
    assert not np.any(np.diag(g.adj))
    assert set(np.unique(g.adj)) <= {0, 1}
    if not g.directed:
        assert np.array_equal(g.adj, g.adj.T)


@pytest.mark.parametrize("n", range(3, 9))
def test_constructor_invariants(n):
    for g in (G.path(n), G.star(n), G.cycle(n), G.complete(n), G.random_balanced_digraph(n, 2, n)):
        _check_invariants(g)
        assert G.is_connected(g)


@pytest.mark.parametrize("n", range(3, 9))
def test_family_bipartiteness(n):
    assert G.is_bipartite(G.cycle(2 * n))
    assert not G.is_bipartite(G.cycle(2 * n + 1))
    assert G.is_bipartite(G.path(n)) and G.is_bipartite(G.star(n))


@given(graphs())
def test_degree_sums_match(g):
    prof = G.degree_profile(g)
    assert sum(prof.k_in) == sum(prof.k_out) == int(g.adj.sum())


@given(graphs(directed=True))
def test_non_positive_divergence_forces_balance(g):
    if G.is_non_positive_divergence(g):
        assert G.is_balanced(g)


@given(graphs())
def test_connectivity_and_bipartite_match_networkx(g):
    h = to_nx(g)
    expect_conn = nx.is_strongly_connected(h) if g.directed else nx.is_connected(h)
    assert G.is_connected(g) == expect_conn
    assert G.is_bipartite(g) == nx.is_bipartite(h.to_undirected())


@given(graphs())
def test_serialize_round_trip(g):
    assert G.parse_graph(G.serialize_graph(g)) == g


@settings(max_examples=50)
@given(st.integers(3, 8), st.integers(1, 5), st.integers(0, 2**63 - 1))
def test_balanced_generator_properties(n, cycles, seed):
    try:
        g = G.random_balanced_digraph(n, cycles, seed)
    except G.ExhaustedAttempts:
        return
    _check_invariants(g)
    assert G.is_connected(g)
    assert G.is_balanced(g) and G.is_non_positive_divergence(g)
    assert g == G.random_balanced_digraph(n, cycles, seed)
