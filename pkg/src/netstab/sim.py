"""ODE integration of static and switched network systems.

Two integrators are provided: classical fixed-step RK4 (the default, and the
one used for all figure reproductions) and Dormand-Prince 5(4) with PI
step-size control. Runs stop early once ``max |x|`` exceeds the divergence
threshold.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from .dynamics import NetworkSystem, NodeSystem
from .errors import InvalidArgument, StiffnessError
from .graph import Graph, is_connected
from .spectral import CouplingConfig

__all__ = [
    "IntegratorConfig", "Trajectory", "SwitchingSignal", "SwitchedNetworkSystem",
    "integrate", "simulate_network", "random_switching_signal", "simulate_switched",
    "estimate_decay_envelope", "largest_lyapunov_exponent", "random_initial_state",
    "read_trajectory_csv",
]

H_MIN = 1e-14


@dataclass(frozen=True)
class IntegratorConfig:
    method: Literal["rk4", "dp54"] = "rk4"
    dt: float = 0.01
    rtol: float = 1e-6
    atol: float = 1e-9
    t_end: float = 10.0
    record_every: int = 1
    divergence_threshold: float = 1e6

    def __post_init__(self):
        if self.method not in ("rk4", "dp54"):
            raise InvalidArgument(f"unknown method {self.method!r}")
        for name in ("dt", "rtol", "atol", "t_end", "divergence_threshold"):
            if not getattr(self, name) > 0:
                raise InvalidArgument(f"{name} must be positive")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise InvalidArgument("record_every must be a positive integer")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    diverged: bool = False
    # index into ``times`` where each constant-mode segment starts
    segment_starts: list[int] = field(default_factory=lambda: [0])

    @property
    def final_norm(self) -> float:
        return float(np.abs(self.states[-1]).max())

    @property
    def initial_norm(self) -> float:
        return float(np.abs(self.states[0]).max())

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, n_nodes: int, d: int, path=None) -> str:
        """CSV text with columns ``t, x_1_1 .. x_N_d``; also written to ``path`` if given."""
        if n_nodes * d != self.states.shape[1]:
            raise InvalidArgument("n_nodes * d does not match the state length")
        buf = io.StringIO()
        cols = ["t"] + [f"x_{i + 1}_{k + 1}" for i in range(n_nodes) for k in range(d)]
        buf.write(",".join(cols) + "\n")
        for t, row in zip(self.times, self.states):
            buf.write(",".join([repr(float(t))] + [repr(float(v)) for v in row]) + "\n")
        buf.write(f"# diverged={'true' if self.diverged else 'false'}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def read_trajectory_csv(text: str) -> Trajectory:
    rows, diverged = [], False
    for line in text.splitlines()[1:]:
        if line.startswith("#"):
            diverged = line.strip().endswith("true")
            continue
        if line.strip():
            rows.append([float(v) for v in line.split(",")])
    arr = np.array(rows)
    return Trajectory(arr[:, 0], arr[:, 1:], diverged)


def _peak(x: np.ndarray) -> float:
    p = float(np.abs(x).max())
    return p if math.isfinite(p) else math.inf


def _rk4_numpy(field_fn, x0, h, n_steps, record_every, threshold):
    x = np.array(x0, dtype=float)
    recs, steps = [x.copy()], [0]
    diverged = False
    for s in range(1, n_steps + 1):
        k1 = field_fn(x)
        k2 = field_fn(x + 0.5 * h * k1)
        k3 = field_fn(x + 0.5 * h * k2)
        k4 = field_fn(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        diverged = _peak(x) > threshold
        if diverged or s % record_every == 0 or s == n_steps:
            recs.append(x.copy())
            steps.append(s)
        if diverged:
            break
    return np.array(recs), np.array(steps), diverged


def _rk4_grid(span: float, dt: float) -> tuple[float, int]:
    n = max(1, math.ceil(span / dt - 1e-9))
    return span / n, n


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def _scaled_norm(v, scale):
    return float(np.abs(v / scale).max())


def _initial_step(field_fn, x0, f0, cfg):
    # Hairer-Norsett-Wanner starting step for a 5th-order method
    scale = cfg.atol + cfg.rtol * np.abs(x0)
    d0, d1 = _scaled_norm(x0, scale), _scaled_norm(f0, scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, cfg.t_end)
    f1 = field_fn(x0 + h0 * f0)
    d2 = _scaled_norm(f1 - f0, scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, cfg.t_end)


def _dp54(field_fn, x0, cfg, safety=0.9, beta=0.04):
    t, x = 0.0, np.array(x0, dtype=float)
    k = [None] * 7
    k[0] = field_fn(x)
    h = _initial_step(field_fn, x, k[0], cfg)
    times, recs = [0.0], [x.copy()]
    err_prev = 1e-4
    rejected = False
    accepted = 0
    diverged = False
    while t < cfg.t_end:
        h = min(h, cfg.t_end - t)
        if h < H_MIN:
            raise StiffnessError(f"step size {h:.3g} underflowed at t = {t:.6g}")
        for s in range(1, 7):
            incr = sum(a * k[j] for j, a in enumerate(_A[s]) if a != 0.0)
            k[s] = field_fn(x + h * incr)
        x_new = x + h * sum(b * k[j] for j, b in enumerate(_B5) if b != 0.0)
        err_vec = h * sum(e * k[j] for j, e in enumerate(_E) if e != 0.0)
        scale = cfg.atol + cfg.rtol * np.maximum(np.abs(x), np.abs(x_new))
        err = max(_scaled_norm(err_vec, scale), 1e-10)
        if not math.isfinite(err):
            err = 1e10
        if err <= 1.0:
            t = cfg.t_end if cfg.t_end - (t + h) < H_MIN else t + h
            x = x_new
            k[0] = k[6]  # FSAL
            accepted += 1
            diverged = _peak(x) > cfg.divergence_threshold
            if diverged or accepted % cfg.record_every == 0 or t >= cfg.t_end:
                times.append(t)
                recs.append(x.copy())
            if diverged:
                break
            fac = safety * err ** (-(0.2 - 0.75 * beta)) * err_prev ** beta
            fac = min(fac, 1.0) if rejected else min(max(fac, 0.2), 10.0)
            err_prev = err
            rejected = False
        else:
            fac = max(safety * err ** -0.2, 0.2)
            rejected = True
        h *= fac
    return np.array(times), np.array(recs), diverged


def integrate(field_fn: Callable[[np.ndarray], np.ndarray], x0, cfg: IntegratorConfig, t0: float = 0.0) -> Trajectory:
    """Integrate ``x' = field_fn(x)`` from ``x0`` over ``[t0, t0 + cfg.t_end]``."""
    x0 = np.asarray(x0, dtype=float)
    if x0.ndim != 1:
        raise InvalidArgument("x0 must be a 1-D state vector")
    if not np.all(np.isfinite(x0)):
        raise InvalidArgument("x0 has non-finite entries")
    if cfg.method == "rk4":
        h, n = _rk4_grid(cfg.t_end, cfg.dt)
        recs, steps, diverged = _rk4_numpy(field_fn, x0, h, n, cfg.record_every, cfg.divergence_threshold)
        times = t0 + steps * h
    else:
        times, recs, diverged = _dp54(field_fn, x0, cfg)
        times = t0 + times
    return Trajectory(times, recs, diverged)


def _fast_path_available(sys: NetworkSystem) -> bool:
    from ._kernels import KIND_IDS

    return sys.is_linear and sys.node.kind in KIND_IDS


def _rk4_network(sys: NetworkSystem, x0, h, n_steps, record_every, threshold, fast):
    if fast is None:
        fast = _fast_path_available(sys)
    if fast:
        from ._kernels import KIND_IDS, rk4_linear_network

        if not _fast_path_available(sys):
            raise InvalidArgument("compiled path needs linear coupling and a shipped node system")
        recs, steps, _, diverged = rk4_linear_network(
            KIND_IDS[sys.node.kind],
            np.asarray(sys.node.params, dtype=float),
            np.ascontiguousarray(sys.laplacian),
            np.ascontiguousarray(sys.channel),
            np.asarray(x0, dtype=float).reshape(sys.n, sys.node.dim).copy(),
            float(h), int(n_steps), int(record_every), float(threshold),
        )
        return recs, steps, bool(diverged)
    return _rk4_numpy(sys.field(), x0, h, n_steps, record_every, threshold)


def simulate_network(sys: NetworkSystem, x0, cfg: IntegratorConfig, fast: Optional[bool] = None,
                     t0: float = 0.0) -> Trajectory:
    """Integrate the network field.

    RK4 runs of linearly coupled shipped node systems use the compiled loop
    unless ``fast=False``; everything else runs through :func:`integrate`.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (sys.dim,):
        raise InvalidArgument(f"x0 must have shape ({sys.dim},), got {x0.shape}")
    if not np.all(np.isfinite(x0)):
        raise InvalidArgument("x0 has non-finite entries")
    if cfg.method == "rk4":
        h, n = _rk4_grid(cfg.t_end, cfg.dt)
        recs, steps, diverged = _rk4_network(sys, x0, h, n, cfg.record_every, cfg.divergence_threshold, fast)
        return Trajectory(t0 + steps * h, recs, diverged)
    return integrate(sys.field(), x0, cfg, t0=t0)


def random_initial_state(n: int, seed: int, low: float = -0.5, high: float = 0.5) -> np.ndarray:
    return np.random.default_rng(seed).uniform(low, high, n)


@dataclass(frozen=True)
class SwitchingSignal:
    """Piecewise-constant mode schedule: ``modes[k]`` is active on ``[t_k, t_{k+1})``."""

    switch_times: tuple[float, ...]
    modes: tuple[int, ...]
    seed: Optional[int] = None
    tau_min: Optional[float] = None

    def __post_init__(self):
        times = tuple(float(t) for t in self.switch_times)
        modes = tuple(int(m) for m in self.modes)
        object.__setattr__(self, "switch_times", times)
        object.__setattr__(self, "modes", modes)
        if len(modes) != len(times) + 1:
            raise InvalidArgument("need exactly one more mode than switch times")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvalidArgument("switch times must be strictly increasing")
        if times and times[0] <= 0:
            raise InvalidArgument("switch times must be positive")
        if any(a == b for a, b in zip(modes, modes[1:])):
            raise InvalidArgument("consecutive modes must differ")
        if min(modes) < 0:
            raise InvalidArgument("mode indices must be non-negative")

    @property
    def num_switches(self) -> int:
        return len(self.switch_times)

    def mode_at(self, t: float) -> int:
        return self.modes[int(np.searchsorted(self.switch_times, t, side="right"))]

    def segments(self, t_end: float) -> list[tuple[float, float, int]]:
        """``(start, stop, mode)`` for every non-empty segment inside ``[0, t_end]``."""
        bounds = [0.0] + [t for t in self.switch_times if t < t_end] + [t_end]
        return [(a, b, self.modes[k]) for k, (a, b) in enumerate(zip(bounds, bounds[1:]))]

    def dwell_times(self, t_end: float) -> list[float]:
        return [b - a for a, b, _ in self.segments(t_end)]

    def to_json(self) -> str:
        return json.dumps({"seed": self.seed, "switch_times": list(self.switch_times), "modes": list(self.modes),
                           "tau_min": self.tau_min})

    @classmethod
    def from_json(cls, text: str) -> "SwitchingSignal":
        doc = json.loads(text)
        return cls(tuple(doc["switch_times"]), tuple(doc["modes"]), doc.get("seed"), doc.get("tau_min"))


def random_switching_signal(num_switches: int, t_end: float, tau_min: float, m: int, seed: int) -> SwitchingSignal:
    """Uniform random switch instants with every dwell at least ``tau_min``.

    The spare time ``t_end - (num_switches + 1) * tau_min`` is cut at sorted
    uniform points and one ``tau_min`` is inserted into each gap. Modes are
    uniform over the ``m`` graphs, never repeating back to back.
    """
    if num_switches < 0 or int(num_switches) != num_switches:
        raise InvalidArgument("num_switches must be a non-negative integer")
    if not tau_min > 0 or not t_end > 0:
        raise InvalidArgument("tau_min and t_end must be positive")
    if m < 1 or (num_switches > 0 and m < 2):
        raise InvalidArgument("switching needs at least two modes")
    spare = t_end - (num_switches + 1) * tau_min
    if spare < 0:
        raise InvalidArgument(
            f"{num_switches} switches with dwell >= {tau_min} do not fit in t_end = {t_end}"
        )
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.uniform(0.0, spare, num_switches))
    times = cuts + tau_min * np.arange(1, num_switches + 1)
    modes = [int(rng.integers(m))]
    for _ in range(num_switches):
        pick = int(rng.integers(m - 1))
        modes.append(pick if pick < modes[-1] else pick + 1)
    return SwitchingSignal(tuple(times), tuple(modes), seed, tau_min)


@dataclass(frozen=True)
class SwitchedNetworkSystem:
    graphs: tuple[Graph, ...]
    node: NodeSystem
    coupling: CouplingConfig

    def __post_init__(self):
        graphs = tuple(self.graphs)
        if not graphs:
            raise InvalidArgument("need at least one graph")
        if len({g.n for g in graphs}) != 1:
            raise InvalidArgument("all graphs must share the same node set")
        for k, g in enumerate(graphs):
            if not is_connected(g):
                raise InvalidArgument(f"graph {k} is not connected")
        object.__setattr__(self, "graphs", graphs)
        object.__setattr__(self, "_modes", tuple(NetworkSystem(g, self.node, self.coupling) for g in graphs))

    def mode(self, k: int) -> NetworkSystem:
        return self._modes[k]

    @property
    def dim(self) -> int:
        return self.graphs[0].n * self.node.dim


def simulate_switched(ssys: SwitchedNetworkSystem, sig: SwitchingSignal, x0, cfg: IntegratorConfig,
                      fast: Optional[bool] = None) -> Trajectory:
    """Integrate segment by segment; each switch instant is a step boundary."""
    if max(sig.modes) >= len(ssys.graphs):
        raise InvalidArgument("switching signal references a mode outside the graph set")
    x = np.asarray(x0, dtype=float)
    times, states, starts = [], [], []
    diverged = False
    for start, stop, mode in sig.segments(cfg.t_end):
        seg_cfg = IntegratorConfig(cfg.method, cfg.dt, cfg.rtol, cfg.atol, stop - start,
                                   cfg.record_every, cfg.divergence_threshold)
        traj = simulate_network(ssys.mode(mode), x, seg_cfg, fast=fast, t0=start)
        skip = 1 if times else 0
        starts.append(max(len(times) - 1, 0))
        times.extend(traj.times[skip:])
        states.extend(traj.states[skip:])
        x = traj.states[-1]
        if traj.diverged:
            diverged = True
            break
    return Trajectory(np.array(times), np.array(states), diverged, starts)


def estimate_decay_envelope(trajs: Sequence[Trajectory]) -> tuple[float, float]:
    """Fit ``|x(t)| <= c |x(0)| exp(-s t)`` (Euclidean norm) over all samples.

    ``s`` is the least-squares decay rate of ``log(|x(t)| / |x(0)|)``; ``c``
    is then the smallest constant bounding every sample. Returns ``s = 0``
    when the fitted rate is not positive.
    """
    if not trajs:
        raise InvalidArgument("need at least one trajectory")
    ts, ys = [], []
    for tr in trajs:
        if tr.diverged:
            raise InvalidArgument("diverged trajectories have no decay envelope")
        norms = np.linalg.norm(tr.states, axis=1)
        if norms[0] <= 0:
            raise InvalidArgument("initial norm must be positive")
        keep = norms > 0
        ts.append(tr.times[keep] - tr.times[0])
        ys.append(np.log(norms[keep] / norms[0]))
    t, y = np.concatenate(ts), np.concatenate(ys)
    slope = np.polyfit(t, y, 1)[0] if np.ptp(t) > 0 else 0.0
    s = max(-float(slope), 0.0)
    c = float(np.exp(np.max(y + s * t)))
    return c, s


def largest_lyapunov_exponent(node: NodeSystem, x0, t_end: float = 500.0, dt: float = 0.01,
                              transient: float = 50.0, renorm_every: int = 10) -> float:
    """Benettin estimate of the top Lyapunov exponent of a single node.

    Diagnostic only. State and one tangent vector are advanced together by
    RK4 and the tangent is renormalized every ``renorm_every`` steps.
    """
    d = node.dim

    def rhs(z):
        x, v = z[:d], z[d:]
        return np.concatenate([node.f(x), node.jac(x) @ v])

    x = np.asarray(x0, dtype=float)
    h, n_tr = _rk4_grid(transient, dt) if transient > 0 else (dt, 0)
    for _ in range(n_tr):
        k1 = node.f(x)
        k2 = node.f(x + 0.5 * h * k1)
        k3 = node.f(x + 0.5 * h * k2)
        k4 = node.f(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    v = np.ones(d) / math.sqrt(d)
    z = np.concatenate([x, v])
    h, n = _rk4_grid(t_end, dt)
    acc = 0.0
    for s in range(1, n + 1):
        k1 = rhs(z)
        k2 = rhs(z + 0.5 * h * k1)
        k3 = rhs(z + 0.5 * h * k2)
        k4 = rhs(z + h * k3)
        z = z + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if s % renorm_every == 0 or s == n:
            norm = float(np.linalg.norm(z[d:]))
            acc += math.log(norm)
            z[d:] /= norm
    return acc / (n * h)
