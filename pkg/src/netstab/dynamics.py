"""Node vector fields, coupling functions and the assembled network field.

Node maps ``f`` accept arrays of shape ``(..., d)`` and act row-wise, which
lets the network field evaluate all ``N`` nodes in one call. ``jac`` takes a
single state of shape ``(d,)``.
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import InvalidArgument, NotAnEquilibrium
from .graph import Graph
from .spectral import CouplingConfig, coupling_laplacian

__all__ = [
    "NodeSystem", "GeneralCoupling", "NetworkSystem", "sprott_circulant",
    "cubic_scalar", "linear_node", "parse_node", "network_vector_field",
    "variational_matrix", "sync_equilibrium_check", "kron",
    "finite_difference_jacobian",
]


@dataclass(frozen=True)
class NodeSystem:
    """Isolated node dynamics ``x' = f(x)`` on R^d with analytic Jacobian.

    ``kind`` names a compiled kernel for the fast integration path; custom
    systems leave it as None and run through numpy.
    """

    dim: int
    f: Callable[[np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray], np.ndarray]
    name: str
    params: tuple = ()
    kind: Optional[str] = None


# sin and tanh both have unit slope at 0, so the origin linearization is
# -mu I - P either way.
_NONLINEARITIES = {
    "tanh": (np.tanh, lambda y: 1.0 - np.tanh(y) ** 2),
    "sin": (np.sin, np.cos),
}

_SHIFT = np.array([1, 2, 0])


def sprott_circulant(mu: float, nonlinearity: str = "tanh") -> NodeSystem:
    """Three-gene ring of cyclic inhibition: ``x_k' = -mu x_k - g(x_{k+1 mod 3})``.

    At the origin the Jacobian is ``-mu I - P`` with P the cyclic shift, so
    the eigenvalues are ``-mu - 1`` and ``-mu + 1/2 +/- i sqrt(3)/2``.
    """
    if nonlinearity not in _NONLINEARITIES:
        raise InvalidArgument(f"nonlinearity must be one of {sorted(_NONLINEARITIES)}")
    g, dg = _NONLINEARITIES[nonlinearity]
    mu = float(mu)

    def f(x):
        x = np.asarray(x, dtype=float)
        return -mu * x - g(x[..., _SHIFT])

    def jac(x):
        x = np.asarray(x, dtype=float)
        j = -mu * np.eye(3)
        for k in range(3):
            j[k, (k + 1) % 3] -= dg(x[(k + 1) % 3])
        return j

    return NodeSystem(3, f, jac, f"sprott(mu={mu:g}, g={nonlinearity})", (mu,), f"sprott_{nonlinearity}")


def cubic_scalar() -> NodeSystem:
    """``x' = -x**3``: globally asymptotically stable with a marginal linearization."""
    return NodeSystem(
        1,
        lambda x: -np.asarray(x, dtype=float) ** 3,
        lambda x: np.array([[-3.0 * float(np.asarray(x).ravel()[0]) ** 2]]),
        "cubic",
        (),
        "cubic",
    )


def linear_node(a) -> NodeSystem:
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgument(f"linear node needs a square matrix, got shape {a.shape}")
    a.setflags(write=False)
    return NodeSystem(
        a.shape[0],
        lambda x: np.asarray(x, dtype=float) @ a.T,
        lambda x: a.copy(),
        f"linear({a.tolist()})",
        tuple(a.ravel()),
        "linear",
    )


_NODE_SPEC = re.compile(r"^\s*(\w+)\s*(?:\((.*)\))?\s*$", re.S)


def parse_node(spec: str) -> NodeSystem:
    """Resolve ``sprott(mu=0.55, g=tanh)``, ``cubic`` or ``linear([[...]])``."""
    m = _NODE_SPEC.match(spec)
    if not m:
        raise InvalidArgument(f"cannot parse node spec {spec!r}")
    name, args = m.group(1), (m.group(2) or "").strip()
    if name == "cubic":
        if args:
            raise InvalidArgument("cubic takes no arguments")
        return cubic_scalar()
    if name == "linear":
        try:
            matrix = ast.literal_eval(args)
        except (ValueError, SyntaxError) as exc:
            raise InvalidArgument(f"bad matrix literal in {spec!r}") from exc
        return linear_node(matrix)
    if name == "sprott":
        kwargs = {"mu": "0.0", "g": "tanh"}
        for part in filter(None, (p.strip() for p in args.split(","))):
            key, sep, value = part.partition("=")
            if not sep or key.strip() not in kwargs:
                raise InvalidArgument(f"bad sprott argument {part!r}")
            kwargs[key.strip()] = value.strip()
        try:
            mu = float(kwargs["mu"])
        except ValueError as exc:
            raise InvalidArgument(f"mu must be a number in {spec!r}") from exc
        return sprott_circulant(mu, kwargs["g"])
    raise InvalidArgument(f"unknown node system {name!r}")


@dataclass(frozen=True)
class GeneralCoupling:
    """Nonlinear pairwise coupling with user-supplied partial derivatives."""

    phi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    du: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dv: Callable[[np.ndarray, np.ndarray], np.ndarray]


Coupling = Union[CouplingConfig, GeneralCoupling]


@dataclass(frozen=True)
class NetworkSystem:
    graph: Graph
    node: NodeSystem
    coupling: Coupling
    _lap: np.ndarray = field(init=False, repr=False, compare=False, default=None)
    _chan: np.ndarray = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if isinstance(self.coupling, CouplingConfig):
            chan = self.coupling.channel_diag(self.node.dim)
            lap = coupling_laplacian(self.graph, self.coupling.alpha, self.coupling.beta)
            lap.setflags(write=False)
            object.__setattr__(self, "_lap", lap)
            object.__setattr__(self, "_chan", chan)
        elif not isinstance(self.coupling, GeneralCoupling):
            raise InvalidArgument("coupling must be CouplingConfig or GeneralCoupling")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def dim(self) -> int:
        return self.graph.n * self.node.dim

    @property
    def is_linear(self) -> bool:
        return isinstance(self.coupling, CouplingConfig)

    @property
    def laplacian(self) -> np.ndarray:
        return self._lap

    @property
    def channel(self) -> np.ndarray:
        return self._chan

    def field(self) -> Callable[[np.ndarray], np.ndarray]:
        """Joint vector field as a one-argument callable for the integrators."""
        return lambda x: network_vector_field(self, x)


def _blocks(sys: NetworkSystem, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != sys.dim:
        raise InvalidArgument(f"joint state has length {x.shape[-1]}, expected N*d = {sys.dim}")
    return x.reshape(x.shape[:-1] + (sys.n, sys.node.dim))


def network_vector_field(sys: NetworkSystem, x) -> np.ndarray:
    """Block i is ``f(x_i) + sum_j A_ij phi(x_i, x_j)``.

    Linear couplings evaluate as ``f-blocks + (L (x) M) x`` and accept
    leading batch axes.
    """
    xb = _blocks(sys, x)
    out = sys.node.f(xb)
    if sys.is_linear:
        out = out + (sys.laplacian @ xb) * sys.channel
    else:
        if xb.ndim != 2:
            raise InvalidArgument("general couplings take a single joint state")
        out = np.array(out, dtype=float)
        phi = sys.coupling.phi
        for src, dst in _arcs(sys.graph):
            out[dst] += phi(xb[dst], xb[src])
    return out.reshape(np.shape(x))


def _arcs(g: Graph):
    # (j, i) for every adj[i, j] = 1, i.e. j feeds i
    dst, src = np.nonzero(g.adj)
    return list(zip(src.tolist(), dst.tolist()))


def variational_matrix(sys: NetworkSystem, xbar) -> np.ndarray:
    """Jacobian of the network field at an arbitrary joint reference state."""
    xb = _blocks(sys, xbar)
    if xb.ndim != 2:
        raise InvalidArgument("reference state must be a single joint state")
    n, d = sys.n, sys.node.dim
    out = np.zeros((n * d, n * d))
    for i in range(n):
        out[i * d:(i + 1) * d, i * d:(i + 1) * d] = sys.node.jac(xb[i])
    if sys.is_linear:
        return out + np.kron(sys.laplacian, np.diag(sys.channel))
    for j, i in _arcs(sys.graph):
        out[i * d:(i + 1) * d, i * d:(i + 1) * d] += sys.coupling.du(xb[i], xb[j])
        out[i * d:(i + 1) * d, j * d:(j + 1) * d] += sys.coupling.dv(xb[i], xb[j])
    return out


def sync_equilibrium_check(sys: NetworkSystem, x0, tol: float = 1e-10) -> bool:
    """Whether ``1 (x) x0`` is an equilibrium of the linearly coupled network."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.node.dim,):
        raise InvalidArgument(f"x0 must have shape ({sys.node.dim},)")
    if np.abs(sys.node.f(x0)).max() > tol:
        raise NotAnEquilibrium("x0 is not an equilibrium of the node dynamics")
    if not sys.is_linear:
        raise InvalidArgument("sync equilibrium check is defined for linear coupling")
    residual = network_vector_field(sys, np.tile(x0, sys.n))
    return bool(np.abs(residual).max() <= tol)


def kron(a, b) -> np.ndarray:
    return np.kron(np.atleast_2d(a), np.atleast_2d(b))


def finite_difference_jacobian(f, x, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of ``f`` at ``x``."""
    x = np.asarray(x, dtype=float)
    fx = np.asarray(f(x), dtype=float)
    jac = np.empty((fx.size, x.size))
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        jac[:, k] = (np.asarray(f(x + e)) - np.asarray(f(x - e))).ravel() / (2 * h)
    return jac
