"""Sufficient conditions for stability of switched networks under arbitrary switching.

Three graph-level checks are provided, from most to least restrictive on
the topology:

* common quadratic Lyapunov function: undirected graphs, ``alpha < 0``,
  ``|alpha| >= |beta|``;
* degree (Gershgorin) condition: ``alpha < 0`` and
  ``2 |alpha| k_in >= |beta| (k_in + k_out)`` at every node of every graph;
* non-positive divergence: ``alpha < 0`` and ``k_out <= k_in`` everywhere.

Node-level hypotheses (quadratic and quadratic-type Lyapunov functions) are
checked numerically.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidArgument, NoSolution
from .graph import Graph, degree_profile, is_non_positive_divergence
from .spectral import coupling_laplacian, eigenvalues

__all__ = [
    "QuadraticLF", "QuadraticTypeLF", "ConditionReport", "solve_node_lyapunov",
    "common_quadratic_condition", "gershgorin_condition",
    "non_positive_divergence_condition", "quadratic_type_check",
    "lyapunov_decrease_along", "sum_of_squares", "block_quadratic", "symmetric_part_max_eig",
]


@dataclass(frozen=True, eq=False)
class QuadraticLF:
    """``v(x) = x^T P x`` with P symmetric positive definite."""

    P: np.ndarray

    def __post_init__(self):
        p = np.array(self.P, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise InvalidArgument("P must be square")
        if np.abs(p - p.T).max() > 1e-12:
            raise InvalidArgument("P must be symmetric")
        if np.linalg.eigvalsh(p).min() <= 0:
            raise InvalidArgument("P must be positive definite")
        p.setflags(write=False)
        object.__setattr__(self, "P", p)

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.P @ x)


@dataclass(frozen=True)
class QuadraticTypeLF:
    """Candidate quadratic-type Lyapunov function together with its comparison functions.

    The hypotheses on a ball ``|x| < a`` are
    ``lambda1(|x|) <= V(x) <= lambda2(|x|)``,
    ``grad V(x) . f(x) <= -c1 gamma(|x|)**2``,
    ``|grad V(x)| <= c2 gamma(|x|)``, and ``gamma(r) <= delta r`` on ``[0, a)``.
    """

    V: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    gamma: Callable[[float], float]
    lambda1: Callable[[float], float]
    lambda2: Callable[[float], float]
    c1: float
    c2: float
    a: float
    delta: float


@dataclass
class ConditionReport:
    """Outcome of one sufficient-condition check.

    ``per_graph`` holds ``(graph index, per-node slacks)``; a negative slack
    marks a node violating the degree inequality. Parameter-level failures
    (sign of alpha, directed graphs where only undirected are allowed) are
    listed in ``reasons``.
    """

    name: str
    passed: bool
    per_graph: list[tuple[int, tuple[float, ...]]] = field(default_factory=list)
    failing_nodes: list[tuple[int, int]] = field(default_factory=list)
    failing_graphs: list[int] = field(default_factory=list)
    reasons: list[str] = field(default_factory=list)
    worst: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "per_graph": [{"graph": k, "slack": list(s)} for k, s in self.per_graph],
            "failing_nodes": [{"graph": k, "node": i} for k, i in self.failing_nodes],
            "failing_graphs": list(self.failing_graphs),
            "reasons": list(self.reasons),
            "worst": self.worst,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def solve_node_lyapunov(a, q=None) -> QuadraticLF:
    """Solve ``A^T P + P A = -Q`` (default ``Q = I``) via the vectorized linear system."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgument("A must be square")
    d = a.shape[0]
    q = np.eye(d) if q is None else np.asarray(q, dtype=float)
    if eigenvalues(a).real.max() >= 0:
        raise NoSolution("A is not Hurwitz; no positive-definite Lyapunov solution")
    # row-major vec: vec(A^T P) = (A^T (x) I) vec P, vec(P A) = (I (x) A^T) vec P
    eye = np.eye(d)
    system = np.kron(a.T, eye) + np.kron(eye, a.T)
    p = np.linalg.solve(system, -q.ravel()).reshape(d, d)
    p = 0.5 * (p + p.T)
    return QuadraticLF(p)


def _profiles(graphs):
    graphs = list(graphs)
    if not graphs:
        raise InvalidArgument("graph list is empty")
    return graphs, [degree_profile(g) for g in graphs]


def common_quadratic_condition(graphs: Sequence[Graph], alpha: float, beta: float,
                               P=None, channel=None) -> ConditionReport:
    """Hypotheses for ``x^T (I (x) P) x`` to be a common Lyapunov function.

    Node slack is ``|alpha| - |beta|``. If both ``P`` and ``channel`` are
    given, the symmetric part of ``P M`` must also be positive semidefinite.
    """
    graphs, _ = _profiles(graphs)
    report = ConditionReport("common_quadratic", True)
    if not alpha < 0:
        report.reasons.append(f"alpha = {alpha:g} is not negative")
    slack = abs(alpha) - abs(beta)
    for k, g in enumerate(graphs):
        report.per_graph.append((k, tuple([slack] * g.n)))
        if g.directed:
            report.failing_graphs.append(k)
            report.reasons.append(f"graph {k} is directed")
        if slack < 0:
            report.failing_nodes.extend((k, i) for i in range(g.n))
    if slack < 0:
        report.reasons.append(f"|alpha| = {abs(alpha):g} < |beta| = {abs(beta):g}")
    if P is not None and channel is not None:
        pm = np.asarray(P, dtype=float) @ np.diag(np.asarray(channel, dtype=float))
        if np.linalg.eigvalsh(0.5 * (pm + pm.T)).min() < -1e-12:
            report.reasons.append("symmetric part of P M is not positive semidefinite")
    report.passed = not report.reasons
    return report


def gershgorin_condition(graphs: Sequence[Graph], alpha: float, beta: float) -> ConditionReport:
    """Degree inequality ``2 |alpha| k_in - |beta| (k_in + k_out) >= 0`` with ``alpha < 0``."""
    graphs, profiles = _profiles(graphs)
    report = ConditionReport("gershgorin", True)
    if not alpha < 0:
        report.reasons.append(f"alpha = {alpha:g} is not negative")
    for k, prof in enumerate(profiles):
        k_in, k_out = np.array(prof.k_in), np.array(prof.k_out)
        slack = 2 * abs(alpha) * k_in - abs(beta) * (k_in + k_out)
        report.per_graph.append((k, tuple(float(s) for s in slack)))
        bad = np.flatnonzero(slack < 0)
        report.failing_nodes.extend((k, int(i)) for i in bad)
        if bad.size:
            report.failing_graphs.append(k)
    if report.failing_nodes:
        report.reasons.append(f"degree inequality violated at {len(report.failing_nodes)} node(s)")
    report.passed = not report.reasons
    return report


def non_positive_divergence_condition(graphs: Sequence[Graph], alpha: float) -> ConditionReport:
    """``alpha < 0`` and ``k_out <= k_in`` at every node; slack is ``k_in - k_out``."""
    graphs, profiles = _profiles(graphs)
    report = ConditionReport("non_positive_divergence", True)
    if not alpha < 0:
        report.reasons.append(f"alpha = {alpha:g} is not negative")
    for k, (g, prof) in enumerate(zip(graphs, profiles)):
        slack = np.array(prof.k_in) - np.array(prof.k_out)
        report.per_graph.append((k, tuple(float(s) for s in slack)))
        if not is_non_positive_divergence(g):
            report.failing_graphs.append(k)
            report.failing_nodes.extend((k, int(i)) for i in np.flatnonzero(slack < 0))
    if report.failing_graphs:
        report.reasons.append(f"graphs {report.failing_graphs} have a node with k_out > k_in")
    report.passed = not report.reasons
    return report


def _ball_samples(d: int, radius: float, samples: int, seed: int) -> np.ndarray:
    # radius drawn uniformly in r (not volume) so the neighbourhood of the
    # origin, where comparison bounds are tightest, is well covered
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((samples, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    r = radius * rng.random(samples)
    r[: min(samples, 8)] = radius * np.logspace(-8, -1, min(samples, 8))
    return dirs * r[:, None]


def quadratic_type_check(lf: QuadraticTypeLF, node, radius: float, samples: int = 2000,
                         seed: int = 0, tol: float = 1e-10) -> ConditionReport:
    """Sampled check of the quadratic-type hypotheses on the ball of given radius.

    Slacks per inequality are recorded; the report fails on the first
    inequality whose worst slack is below ``-tol`` and stores the point.
    """
    report = ConditionReport("quadratic_type", True)
    if not radius < lf.a:
        raise InvalidArgument(f"radius {radius} must be below a = {lf.a}")
    zero = np.zeros(node.dim)
    v0 = float(lf.V(zero))
    if abs(v0) > tol:
        report.passed = False
        report.reasons.append(f"V(0) = {v0:g} does not vanish")
        report.worst = {"inequality": "origin", "x": zero.tolist(), "slack": -abs(v0)}
        return report

    pts = _ball_samples(node.dim, radius, samples, seed)
    slacks = {"lower_bound": [], "upper_bound": [], "decrease": [], "gradient_bound": [], "sublinearity": []}
    for x in pts:
        r = float(np.linalg.norm(x))
        v = float(lf.V(x))
        g = np.asarray(lf.grad(x), dtype=float).ravel()
        fx = np.asarray(node.f(x), dtype=float).ravel()
        gam = float(lf.gamma(r))
        slacks["lower_bound"].append(v - lf.lambda1(r))
        slacks["upper_bound"].append(lf.lambda2(r) - v)
        slacks["decrease"].append(-lf.c1 * gam ** 2 - float(g @ fx))
        slacks["gradient_bound"].append(lf.c2 * gam - float(np.linalg.norm(g)))
        slacks["sublinearity"].append(lf.delta * r - gam)

    summary = {}
    for name, vals in slacks.items():
        vals = np.asarray(vals)
        k = int(np.argmin(vals))
        summary[name] = float(vals[k])
        if vals[k] < -tol:
            report.reasons.append(f"{name} violated (worst slack {vals[k]:.3g} at |x| = {np.linalg.norm(pts[k]):.3g})")
            if report.worst is None:
                report.worst = {"inequality": name, "x": pts[k].tolist(), "slack": float(vals[k])}
    report.per_graph.append((0, tuple(summary.values())))
    report.passed = not report.reasons
    return report


def lyapunov_decrease_along(traj, V: Callable[[np.ndarray], float], rel_tol: float = 1e-9) -> ConditionReport:
    """Check that ``V`` never increases between recorded samples, up to ``rel_tol * max |V|``."""
    report = ConditionReport("lyapunov_decrease", True)
    if traj.diverged:
        report.passed = False
        report.reasons.append("trajectory diverged")
        return report
    values = np.array([V(x) for x in traj.states], dtype=float)
    scale = float(np.abs(values).max()) if values.size else 0.0
    inc = np.diff(values)
    bad = np.flatnonzero(inc > rel_tol * scale)
    report.per_graph.append((0, (float(-inc.max()) if inc.size else 0.0,)))
    if bad.size:
        k = int(bad[0])
        report.passed = False
        report.reasons.append(f"V increased at {bad.size} sample(s), first at t = {traj.times[k + 1]:.6g}")
        report.worst = {"inequality": "decrease", "t": float(traj.times[k + 1]), "increase": float(inc[k])}
    return report


def sum_of_squares(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x @ x)


def block_quadratic(P, n_nodes: int) -> Callable[[np.ndarray], float]:
    """``x -> x^T (I_N (x) P) x``."""
    big = np.kron(np.eye(n_nodes), np.asarray(P, dtype=float))
    return lambda x: float(np.asarray(x) @ big @ np.asarray(x))


def symmetric_part_max_eig(g: Graph, alpha: float, beta: float) -> float:
    lap = coupling_laplacian(g, alpha, beta)
    return float(np.linalg.eigvalsh(0.5 * (lap + lap.T)).max())
