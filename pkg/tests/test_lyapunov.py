import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import solve_continuous_lyapunov

from netstab import graph as G
from netstab.dynamics import cubic_scalar, linear_node
from netstab.errors import InvalidArgument, NoSolution
from netstab.lyapunov import (QuadraticLF, QuadraticTypeLF, block_quadratic, common_quadratic_condition,
                              gershgorin_condition, lyapunov_decrease_along, non_positive_divergence_condition,
                              quadratic_type_check, solve_node_lyapunov, sum_of_squares, symmetric_part_max_eig)
from netstab.sim import Trajectory

from oracles import cubic_quadratic_type_lf, random_hurwitz


def test_lyapunov_scalar():
    assert solve_node_lyapunov([[-1.0]]).P.tolist() == [[0.5]]


def test_lyapunov_diagonal():
    p = solve_node_lyapunov(np.diag([-1.0, -2.0])).P
    assert np.allclose(p, np.diag([0.5, 0.25]))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_lyapunov_matches_scipy(d):
    rng = np.random.default_rng(d)
    a = random_hurwitz(d, rng)
    q = np.eye(d) + 0.1 * np.ones((d, d))
    ours = solve_node_lyapunov(a, q).P
    # scipy solves A X + X A^H = Q; pass A^T and -Q for A^T P + P A = -Q
    ref = solve_continuous_lyapunov(a.T, -q)
    assert np.allclose(ours, ref, atol=1e-10)


def test_lyapunov_rejects_non_hurwitz():
    with pytest.raises(NoSolution):
        solve_node_lyapunov([[0.0, 1.0], [-1.0, 0.0]])
    with pytest.raises(InvalidArgument):
        solve_node_lyapunov(np.zeros((2, 3)))


def test_quadratic_lf_validation():
    with pytest.raises(InvalidArgument):
        QuadraticLF(np.array([[1.0, 0.0], [0.0, -1.0]]))
    with pytest.raises(InvalidArgument):
        QuadraticLF(np.array([[1.0, 0.5], [0.0, 1.0]]))
    assert QuadraticLF(np.eye(2))(np.array([3.0, 4.0])) == 25.0


def test_block_quadratic():
    V = block_quadratic(np.diag([1.0, 2.0]), 2)
    assert V(np.array([1.0, 1.0, 1.0, 1.0])) == 6.0
    assert sum_of_squares([1.0, 2.0]) == 5.0


def test_common_quadratic_examples():
    ok = common_quadratic_condition([G.cycle(4), G.fig3_graph()], -1.0, 0.5)
    assert ok.passed and ok.per_graph[0][1] == (0.5,) * 4
    weak = common_quadratic_condition([G.cycle(4)], -0.5, 1.0)
    assert not weak.passed and len(weak.failing_nodes) == 4
    directed = common_quadratic_condition([G.random_balanced_digraph(4, 2, 0)], -1.0, 1.0)
    assert not directed.passed and directed.failing_graphs == [0]
    positive = common_quadratic_condition([G.cycle(4)], 1.0, 0.5)
    assert not positive.passed and "not negative" in positive.reasons[0]


def test_common_quadratic_channel_psd():
    p = np.eye(2)
    assert common_quadratic_condition([G.cycle(3)], -1.0, 1.0, P=p, channel=[1.0, 0.0]).passed
    assert not common_quadratic_condition([G.cycle(3)], -1.0, 1.0, P=p, channel=[1.0, -1.0]).passed


def test_gershgorin_example():
    # out-star: hub emits 3 arcs, receives none; leaves receive one each
    g = G.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 0)], directed=True)
    rep = gershgorin_condition([g], -1.0, 1.0)
    assert not rep.passed
    assert (0, 0) in rep.failing_nodes
    assert rep.per_graph[0][1][0] == 2 * 1 - (1 + 3)


def test_non_positive_divergence_examples():
    bal = [G.random_balanced_digraph(4, 3, 2024 + k) for k in range(5)]
    assert non_positive_divergence_condition(bal, -1.0).passed
    flipped = non_positive_divergence_condition(bal, 1.0)
    assert not flipped.passed and any("alpha" in r for r in flipped.reasons)
    leaky = G.from_edges(3, [(0, 1), (1, 2), (2, 0), (0, 2)], directed=True)
    rep = non_positive_divergence_condition([leaky], -1.0)
    assert not rep.passed and rep.failing_nodes == [(0, 0)]


def test_condition_report_json():
    doc = gershgorin_condition([G.cycle(3)], -1.0, 1.0).to_dict()
    assert doc["passed"] and doc["per_graph"][0]["slack"] == [0.0, 0.0, 0.0]


@st.composite
def graph_sets(draw, directed):
    count = draw(st.integers(1, 4))
    n = draw(st.integers(2, 6))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    return [G.random_connected_graph(n, 0.5, rng, directed=directed) for _ in range(count)]


@settings(max_examples=80, deadline=None)
@given(graph_sets(False), st.floats(-3, 3), st.floats(-3, 3))
def test_gershgorin_equals_common_quadratic_undirected(graphs, alpha, beta):
    assert gershgorin_condition(graphs, alpha, beta).passed == \
        common_quadratic_condition(graphs, alpha, beta).passed


@settings(max_examples=80, deadline=None)
@given(graph_sets(True), st.floats(-3, -1e-3), st.floats(-1, 1))
def test_conditions_imply_dissipative_coupling(graphs, alpha, beta):
    # whenever a degree-type condition passes, sym(L_ab) is negative semidefinite
    beta = beta * abs(alpha)
    if gershgorin_condition(graphs, alpha, beta).passed:
        assert all(symmetric_part_max_eig(g, alpha, beta) <= 1e-9 for g in graphs)
    if non_positive_divergence_condition(graphs, alpha).passed and abs(beta) <= abs(alpha):
        assert all(symmetric_part_max_eig(g, alpha, beta) <= 1e-9 for g in graphs)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 7), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_balanced_graphs_pass_divergence_check(n, cycles, seed):
    try:
        g = G.random_balanced_digraph(n, cycles, seed)
    except G.ExhaustedAttempts:
        return
    assert non_positive_divergence_condition([g], -1.0).passed


@pytest.mark.parametrize("c2", [1.0, 1e3, 1e6])
def test_quadratic_type_gradient_bound_fails_near_origin(c2):
    # |x| <= c2 x^2 fails for |x| < 1 / c2, so no constant rescues it
    rep = quadratic_type_check(cubic_quadratic_type_lf(c2), cubic_scalar(), radius=0.9)
    assert not rep.passed
    assert rep.worst["inequality"] == "gradient_bound"
    assert abs(rep.worst["x"][0]) < 1.0 / c2
    assert all("gradient_bound" in r for r in rep.reasons)


def test_quadratic_type_passes_for_linear_node():
    lf = QuadraticTypeLF(V=lambda x: 0.5 * float(x @ x), grad=lambda x: x, gamma=lambda r: r,
                         lambda1=lambda r: 0.5 * r ** 2, lambda2=lambda r: 0.5 * r ** 2,
                         c1=1.0, c2=1.0, a=10.0, delta=1.0)
    assert quadratic_type_check(lf, linear_node([[-1.0]]), radius=5.0).passed


def test_quadratic_type_radius_check():
    with pytest.raises(InvalidArgument):
        quadratic_type_check(cubic_quadratic_type_lf(), cubic_scalar(), radius=2.0)


def test_lyapunov_decrease_along():
    t = np.linspace(0, 1, 11)
    down = Trajectory(t, np.exp(-t)[:, None])
    assert lyapunov_decrease_along(down, sum_of_squares).passed
    bump = Trajectory(t, (np.exp(-t) + 0.2 * (t > 0.5))[:, None])
    rep = lyapunov_decrease_along(bump, sum_of_squares)
    assert not rep.passed and rep.worst["t"] == pytest.approx(0.6)
    assert not lyapunov_decrease_along(Trajectory(t, np.exp(-t)[:, None], diverged=True), sum_of_squares).passed
