"""Coupling Laplacians, spectra and critical coupling values.

With linear coupling ``phi(u, v) = M (alpha u + beta v)`` the joint
linearization at a synchronized equilibrium is ``I_N (x) Df(x0) + L (x) M``
with ``L = alpha D_in + beta A``. For ``M = I`` its spectrum is the set sum
of the node spectrum and the Laplacian spectrum, which is what makes
critical coupling values available in closed form.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np

from .errors import InvalidArgument, MarginalNode, NotAnEquilibrium, NotStabilizable, NumericalFailure
from .graph import Graph

__all__ = [
    "CouplingConfig", "SpectralReport", "coupling_laplacian", "network_laplacian",
    "eigenvalues", "sort_spectrum", "spectra_match", "jacobian_spectrum_sum",
    "node_spectrum", "full_network_jacobian", "critical_coupling", "stability_verdict",
    "necessary_condition_check", "variant_of",
]

Sign = Literal["plus", "minus"]
Regime = Literal["stable_node", "unstable_node"]

ZERO_TOL = 1e-10
SYMMETRY_TOL = 1e-12
MAX_EIG_SIZE = 2000


@dataclass(frozen=True)
class CouplingConfig:
    """Linear coupling parameters; ``channel`` holds the diagonal of M (None = identity)."""

    alpha: float
    beta: float
    channel: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.channel is not None:
            ch = tuple(int(c) for c in self.channel)
            if not ch or any(c not in (0, 1) for c in ch):
                raise InvalidArgument("channel entries must be 0 or 1")
            if not any(ch):
                raise InvalidArgument("channel needs at least one active entry")
            object.__setattr__(self, "channel", ch)

    @classmethod
    def diffusive(cls, alpha: float, channel=None) -> "CouplingConfig":
        return cls(alpha, -alpha, channel)

    @classmethod
    def signless(cls, alpha: float, channel=None) -> "CouplingConfig":
        return cls(alpha, alpha, channel)

    def channel_diag(self, d: int) -> np.ndarray:
        if self.channel is None:
            return np.ones(d)
        if len(self.channel) != d:
            raise InvalidArgument(f"channel has {len(self.channel)} entries, node dimension is {d}")
        return np.asarray(self.channel, dtype=float)

    def channel_matrix(self, d: int) -> np.ndarray:
        return np.diag(self.channel_diag(d))

    def is_identity_channel(self, d: int) -> bool:
        return bool(np.all(self.channel_diag(d) == 1))


def variant_of(alpha: float, beta: float) -> Optional[Sign]:
    """``plus`` for beta == alpha, ``minus`` for beta == -alpha, else None."""
    if alpha == 0 and beta == 0:
        return None
    if np.isclose(beta, alpha, rtol=0, atol=1e-14 * max(1.0, abs(alpha))):
        return "plus"
    if np.isclose(beta, -alpha, rtol=0, atol=1e-14 * max(1.0, abs(alpha))):
        return "minus"
    return None


def coupling_laplacian(g: Graph, alpha: float, beta: float) -> np.ndarray:
    """``alpha * D_in + beta * A``."""
    a = g.adj.astype(float)
    return alpha * np.diag(a.sum(axis=1)) + beta * a


def network_laplacian(g: Graph, sign: Sign) -> np.ndarray:
    """``D_in + A`` (signless) or ``D_in - A`` (classical)."""
    if sign == "plus":
        return coupling_laplacian(g, 1.0, 1.0)
    if sign == "minus":
        return coupling_laplacian(g, 1.0, -1.0)
    raise InvalidArgument(f"sign must be 'plus' or 'minus', got {sign!r}")


def sort_spectrum(eigs) -> np.ndarray:
    eigs = np.asarray(eigs, dtype=complex)
    return eigs[np.lexsort((eigs.imag, eigs.real))]


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues with multiplicity, sorted by (real, imag).

    Symmetric input goes through the symmetric tridiagonal solver and comes
    back with exactly zero imaginary parts; everything else uses balanced
    Hessenberg reduction plus shifted QR (LAPACK ``geev``).
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgument(f"eigenvalues need a square matrix, got shape {m.shape}")
    if m.shape[0] > MAX_EIG_SIZE:
        raise InvalidArgument(f"matrix size {m.shape[0]} exceeds {MAX_EIG_SIZE}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgument("matrix has non-finite entries")
    if m.shape[0] == 0:
        return np.zeros(0, dtype=complex)
    try:
        if np.abs(m - m.T).sum(axis=1).max() < SYMMETRY_TOL:
            vals = np.linalg.eigvalsh(0.5 * (m + m.T)).astype(complex)
        else:
            vals = np.linalg.eigvals(m)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigenvalue iteration did not converge: {exc}") from exc
    return sort_spectrum(vals)


def spectra_match(a, b, tol: float = 1e-8) -> bool:
    """Multiset equality after lexicographic (Re, Im) sorting."""
    a, b = sort_spectrum(a), sort_spectrum(b)
    if a.shape != b.shape:
        return False
    if np.all(np.abs(a - b) <= tol):
        return True
    # Near-ties in the real part can order conjugate pairs differently; fall
    # back to greedy nearest matching.
    remaining = list(b)
    for z in a:
        dists = [abs(z - w) for w in remaining]
        k = int(np.argmin(dists))
        if dists[k] > tol:
            return False
        remaining.pop(k)
    return True


def jacobian_spectrum_sum(node_eigs, lap_eigs, alpha: float = 1.0) -> np.ndarray:
    """Multiset ``{nu_i + alpha * lambda_j}`` of size ``d * N``."""
    nu = np.asarray(node_eigs, dtype=complex).ravel()
    lam = np.asarray(lap_eigs, dtype=complex).ravel()
    if nu.size == 0 or lam.size == 0:
        raise InvalidArgument("both spectra must be non-empty")
    return sort_spectrum((nu[:, None] + alpha * lam[None, :]).ravel())


def node_spectrum(node, x0=None) -> np.ndarray:
    x0 = np.zeros(node.dim) if x0 is None else np.asarray(x0, dtype=float)
    return eigenvalues(node.jac(x0))


def full_network_jacobian(node, g: Graph, cfg: CouplingConfig, x0=None) -> np.ndarray:
    """``I_N (x) Df(x0) + L_ab (x) M`` as a dense ``Nd x Nd`` matrix."""
    x0 = np.zeros(node.dim) if x0 is None else np.asarray(x0, dtype=float)
    if x0.shape != (node.dim,):
        raise InvalidArgument(f"reference state has shape {x0.shape}, node dimension is {node.dim}")
    df = np.asarray(node.jac(x0), dtype=float)
    lap = coupling_laplacian(g, cfg.alpha, cfg.beta)
    return np.kron(np.eye(g.n), df) + np.kron(lap, cfg.channel_matrix(node.dim))


def _nu_max(node) -> float:
    return float(node_spectrum(node).real.max())


def critical_coupling(node, g: Graph, sign: Sign, regime: Regime) -> float:
    """Coupling value where the spectral margin of the network crosses zero.

    ``stable_node``: ``-nu_max / lambda_max``; the network is stable below it.
    ``unstable_node``: ``-nu_max / lambda_min``; the network is stable below
    this (negative) value. Here ``lambda`` ranges over real parts of the
    spectrum of ``D_in +/- A`` and ``nu_max`` is the largest real part of the
    node linearization at the origin.
    """
    nu_max = _nu_max(node)
    if abs(nu_max) < ZERO_TOL:
        raise MarginalNode(f"node linearization is marginal (nu_max = {nu_max:.3g})")
    lam = eigenvalues(network_laplacian(g, sign)).real
    if regime == "stable_node":
        if nu_max > 0:
            raise InvalidArgument(f"stable_node regime needs nu_max < 0, got {nu_max:.6g}")
        lam_max = lam.max()
        if lam_max < ZERO_TOL:
            raise InvalidArgument("graph has no edges; lambda_max vanishes")
        return float(-nu_max / lam_max)
    if regime == "unstable_node":
        if nu_max < 0:
            raise InvalidArgument(f"unstable_node regime needs nu_max > 0, got {nu_max:.6g}")
        lam_min = lam.min()
        if abs(lam_min) < ZERO_TOL:
            raise NotStabilizable(
                f"0 is in the spectrum of L{'+' if sign == 'plus' else '-'}; "
                "not stabilizable by coupling alone"
            )
        return float(-nu_max / lam_min)
    raise InvalidArgument(f"unknown regime {regime!r}")


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    margin: float
    verdict: str
    nu_max: float
    lambda_min: Optional[float] = None
    lambda_max: Optional[float] = None
    alpha_c: Optional[float] = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "margin": self.margin,
            "verdict": self.verdict,
            "nu_max": self.nu_max,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "alpha_c": self.alpha_c,
            "notes": list(self.notes),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _verdict(margin: float, tol: float) -> str:
    if margin < -tol:
        return "Stable"
    if margin > tol:
        return "Unstable"
    return "Marginal"


def stability_verdict(node, g: Graph, cfg: CouplingConfig, tol: float = 1e-9) -> SpectralReport:
    """Local stability of the origin of the coupled network.

    Uses the spectrum-sum shortcut when the channel matrix is the identity
    and a full Kronecker eigensolve otherwise. Laplacian extremes and the
    critical coupling are reported for the matching diffusive/signless
    variant when ``|alpha| == |beta|``, for ``alpha D + beta A`` otherwise.
    """
    zero = np.zeros(node.dim)
    if np.abs(node.f(zero)).max() > 1e-12:
        raise NotAnEquilibrium("f(0) != 0; shift coordinates so the equilibrium is at the origin")
    nu = node_spectrum(node)
    nu_max = float(nu.real.max())
    if cfg.is_identity_channel(node.dim):
        lap_eigs = eigenvalues(coupling_laplacian(g, cfg.alpha, cfg.beta))
        spec = jacobian_spectrum_sum(nu, lap_eigs, 1.0)
    else:
        spec = eigenvalues(full_network_jacobian(node, g, cfg))
    margin = float(spec.real.max())
    report = SpectralReport(spec, margin, _verdict(margin, tol), nu_max)

    sign = variant_of(cfg.alpha, cfg.beta)
    if sign is not None:
        lam = eigenvalues(network_laplacian(g, sign)).real
        report.notes.append(f"variant L{'+' if sign == 'plus' else '-'}")
        regime = "stable_node" if nu_max < 0 else "unstable_node"
        try:
            report.alpha_c = critical_coupling(node, g, sign, regime)
        except (MarginalNode, NotStabilizable) as exc:
            report.notes.append(str(exc))
    else:
        lam = eigenvalues(coupling_laplacian(g, cfg.alpha, cfg.beta)).real
    report.lambda_min = float(lam.min())
    report.lambda_max = float(lam.max())
    return report


def necessary_condition_check(node, g: Graph, cfg: CouplingConfig) -> bool:
    """False when coupling and node instability provably make the network unstable.

    Fires when ``L_ab`` has an eigenvalue in the open right half-plane and the
    node linearization has one in the closed right half-plane; True means
    inconclusive.
    """
    lap = eigenvalues(coupling_laplacian(g, cfg.alpha, cfg.beta))
    nu = node_spectrum(node)
    lap_rhp = bool(np.any(lap.real > ZERO_TOL))
    node_unstable = bool(np.any(nu.real >= -1e-12))
    return not (lap_rhp and node_unstable)
