"""Simple graph topologies for network dynamical systems.

Adjacency orientation: ``adj[i, j] == 1`` means node ``j`` feeds node ``i``,
so row sums are in-degrees and column sums are out-degrees. Node indices are
0-based in the API and 1-based in the text edge-list format.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ExhaustedAttempts, GraphParseError, InvalidArgument

__all__ = [
    "Graph", "DegreeProfile", "from_edges", "path", "star", "cycle", "complete",
    "fig3_graph", "is_connected", "is_bipartite", "degree_profile",
    "is_non_positive_divergence", "is_balanced", "random_balanced_digraph",
    "random_connected_graph", "parse_graph", "parse_graphs", "serialize_graph",
    "serialize_graphs", "resolve_graph",
]

MAX_ATTEMPTS = 1000


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph on ``n`` nodes."""

    adj: np.ndarray
    directed: bool = False
    name: str = ""

    def __post_init__(self):
        a = np.array(self.adj)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidArgument(f"adjacency must be a non-empty square matrix, got shape {a.shape}")
        if not np.all((a == 0) | (a == 1)):
            raise InvalidArgument("adjacency entries must be 0 or 1")
        a = a.astype(np.int8)
        if np.any(np.diag(a)):
            raise InvalidArgument("self-loops are not allowed")
        if not self.directed and not np.array_equal(a, a.T):
            raise InvalidArgument("undirected graph requires a symmetric adjacency")
        a.setflags(write=False)
        object.__setattr__(self, "adj", a)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def edge_count(self) -> int:
        """Number of edges; an undirected edge counts once."""
        total = int(self.adj.sum())
        return total if self.directed else total // 2

    def edges(self) -> list[tuple[int, int]]:
        """``(source, target)`` pairs in source-ascending, target-ascending order.

        Undirected graphs list each edge once with ``source < target``.
        """
        out = []
        for src in range(self.n):
            for dst in range(self.n):
                if self.adj[dst, src] and (self.directed or src < dst):
                    out.append((src, dst))
        return out

    def underlying(self) -> np.ndarray:
        """Symmetrized 0/1 adjacency of the underlying undirected graph."""
        return ((self.adj + self.adj.T) > 0).astype(np.int8)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.directed == other.directed and np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.directed, self.adj.tobytes(), self.n))

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        label = f" {self.name!r}" if self.name else ""
        return f"Graph({kind}, n={self.n}, edges={self.edge_count}{label})"


@dataclass(frozen=True)
class DegreeProfile:
    k_in: tuple[int, ...]
    k_out: tuple[int, ...]


def from_edges(n: int, edges, directed: bool = False, name: str = "") -> Graph:
    """Build a graph from 0-based ``(source, target)`` pairs."""
    if n < 1:
        raise InvalidArgument("n must be positive")
    adj = np.zeros((n, n), dtype=np.int8)
    for src, dst in edges:
        if not (0 <= src < n and 0 <= dst < n):
            raise InvalidArgument(f"edge ({src}, {dst}) out of range for n={n}")
        adj[dst, src] = 1
        if not directed:
            adj[src, dst] = 1
    return Graph(adj, directed=directed, name=name)


def _require(n, low, family):
    if int(n) != n or n < low:
        raise InvalidArgument(f"{family} graph needs n >= {low}, got {n}")


def path(n: int) -> Graph:
    _require(n, 2, "path")
    return from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"path{n}")


def star(n: int) -> Graph:
    _require(n, 2, "star")
    return from_edges(n, [(0, i) for i in range(1, n)], name=f"star{n}")


def cycle(n: int) -> Graph:
    _require(n, 3, "cycle")
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)], name=f"cycle{n}")


def complete(n: int) -> Graph:
    _require(n, 2, "complete")
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], name=f"complete{n}")


def fig3_graph() -> Graph:
    """Four-node square 1-2-3-4 with the chord 1-3."""
    return from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], name="fig3")


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    # adj[i, j] = 1 is an arc j -> i; follow arcs forward.
    seen = np.zeros(adj.shape[0], dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        j = queue.popleft()
        for i in np.flatnonzero(adj[:, j]):
            if not seen[i]:
                seen[i] = True
                queue.append(i)
    return seen


def is_connected(g: Graph) -> bool:
    """Connectivity; strong connectivity when ``g`` is directed."""
    if g.n == 1:
        return True
    if not g.directed:
        return bool(_reachable(g.adj, 0).all())
    return bool(_reachable(g.adj, 0).all() and _reachable(g.adj.T, 0).all())


def is_bipartite(g: Graph) -> bool:
    """Breadth-first 2-coloring of the underlying undirected graph."""
    und = g.underlying()
    color = np.full(g.n, -1)
    for root in range(g.n):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(und[u]):
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    queue.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def degree_profile(g: Graph) -> DegreeProfile:
    k_in = tuple(int(k) for k in g.adj.sum(axis=1))
    k_out = tuple(int(k) for k in g.adj.sum(axis=0))
    return DegreeProfile(k_in, k_out)


def is_non_positive_divergence(g: Graph) -> bool:
    """True iff every node's out-degree is at most its in-degree."""
    prof = degree_profile(g)
    return all(o <= i for i, o in zip(prof.k_in, prof.k_out))


def is_balanced(g: Graph) -> bool:
    prof = degree_profile(g)
    return prof.k_in == prof.k_out


def random_balanced_digraph(n: int, cycles: int, seed: int) -> Graph:
    """Strongly connected balanced digraph built by superposing directed cycles.

    A random spanning cycle guarantees strong connectivity; each of the
    further ``cycles - 1`` cycles runs through a random ordered subset of 2..n
    nodes. A candidate cycle sharing an arc with the graph so far is rejected
    and redrawn, so the result stays simple and every node keeps
    ``k_in == k_out``.
    """
    if n < 3:
        raise InvalidArgument("balanced digraph needs n >= 3")
    if cycles < 1:
        raise InvalidArgument("cycles must be >= 1")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    arcs = {(int(perm[k]), int(perm[(k + 1) % n])) for k in range(n)}
    added = 1
    attempts = 0
    while added < cycles:
        if attempts >= MAX_ATTEMPTS:
            raise ExhaustedAttempts(
                f"could not place {cycles} arc-disjoint cycles on {n} nodes in {MAX_ATTEMPTS} attempts"
            )
        attempts += 1
        size = int(rng.integers(2, n + 1))
        nodes = rng.choice(n, size=size, replace=False)
        cand = {(int(nodes[k]), int(nodes[(k + 1) % size])) for k in range(size)}
        if cand & arcs:
            continue
        arcs |= cand
        added += 1
    return from_edges(n, sorted(arcs), directed=True, name=f"balanced{n}_c{cycles}_s{seed}")


def random_connected_graph(n: int, p: float, rng: np.random.Generator, directed: bool = False) -> Graph:
    """Erdos-Renyi draw conditioned on (strong) connectivity by rejection."""
    for _ in range(MAX_ATTEMPTS):
        if directed:
            adj = (rng.random((n, n)) < p).astype(np.int8)
            np.fill_diagonal(adj, 0)
        else:
            upper = np.triu((rng.random((n, n)) < p).astype(np.int8), 1)
            adj = upper + upper.T
        g = Graph(adj, directed=directed)
        if is_connected(g):
            return g
    raise ExhaustedAttempts(f"no connected G({n}, {p}) sample in {MAX_ATTEMPTS} attempts")


# -- edge-list text format -------------------------------------------------

_HEADER = re.compile(r"^(directed|undirected)\s+(\d+)$")


def _parse_blocks(text: str) -> list[Graph]:
    graphs = []
    current = None  # (directed, n, arcs, header_line)

    def close():
        if current is not None:
            directed, n, arcs, _ = current
            graphs.append(from_edges(n, arcs, directed=directed))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        header = _HEADER.match(line)
        if header:
            close()
            n = int(header.group(2))
            if n < 1:
                raise GraphParseError("node count must be positive", lineno)
            current = (header.group(1) == "directed", n, [], lineno)
            continue
        if current is None:
            raise GraphParseError("expected header 'directed N' or 'undirected N'", lineno)
        directed, n, arcs, _ = current
        parts = line.split()
        if len(parts) != 2 or not all(p.lstrip("-").isdigit() for p in parts):
            raise GraphParseError(f"expected 'i j', got {line!r}", lineno)
        i, j = (int(p) for p in parts)
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphParseError(f"node index out of range 1..{n}: {line!r}", lineno)
        if i == j:
            raise GraphParseError(f"self-loop at node {i}", lineno)
        arc = (i - 1, j - 1)
        dup = arc in arcs or (not directed and arc[::-1] in arcs)
        if dup:
            raise GraphParseError(f"duplicate edge {i} {j}", lineno)
        arcs.append(arc)
    close()
    return graphs


def parse_graph(text: str) -> Graph:
    """Parse one graph in edge-list format; line ``i j`` is the edge i -> j."""
    graphs = _parse_blocks(text)
    if len(graphs) != 1:
        raise GraphParseError(f"expected exactly one graph, found {len(graphs)}")
    return graphs[0]


def parse_graphs(text: str) -> list[Graph]:
    """Parse a file holding several graphs; each header line starts a new one."""
    graphs = _parse_blocks(text)
    if not graphs:
        raise GraphParseError("no graph found")
    return graphs


def serialize_graph(g: Graph) -> str:
    lines = [f"{'directed' if g.directed else 'undirected'} {g.n}"]
    lines += [f"{s + 1} {t + 1}" for s, t in g.edges()]
    return "\n".join(lines) + "\n"


def serialize_graphs(graphs) -> str:
    return "\n".join(serialize_graph(g) for g in graphs)


_FAMILIES = {"path": path, "star": star, "cycle": cycle, "complete": complete}
_NAMED = re.compile(r"^(path|star|cycle|complete)(\d+)$")


def resolve_graph(spec: str) -> Graph:
    """Resolve ``fig3``, ``cycle4``, ``path5``, ... or a path to an edge-list file."""
    spec = spec.strip()
    if spec == "fig3":
        return fig3_graph()
    m = _NAMED.match(spec)
    if m:
        return _FAMILIES[m.group(1)](int(m.group(2)))
    p = Path(spec)
    if p.is_file():
        return parse_graph(p.read_text())
    raise InvalidArgument(f"unknown graph spec {spec!r}")
