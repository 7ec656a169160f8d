"""Figure reproductions: configurations, runners and file output."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional


from . import graph as G
from .dynamics import NetworkSystem, parse_node
from .errors import InvalidArgument
from .lyapunov import (ConditionReport, common_quadratic_condition, gershgorin_condition,
                       lyapunov_decrease_along, non_positive_divergence_condition, sum_of_squares)
from .sim import (IntegratorConfig, SwitchedNetworkSystem, Trajectory, random_initial_state,
                  random_switching_signal, simulate_network, simulate_switched)
from .spectral import CouplingConfig, SpectralReport, critical_coupling, stability_verdict
from .svg import line_plot, projection_plot

__all__ = ["ExperimentConfig", "ExperimentResult", "FIGURES", "DEFAULT_SEED", "fig7_graphs",
           "figure_config", "run_experiment", "write_outputs"]

DEFAULT_SEED = 2024
SPROTT_T_END = 2000.0
SWITCHED_T_END = 70.0
OFFSET = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    node: str
    graphs: tuple[str, ...]
    alpha: Optional[float] = None
    beta: Optional[float] = None
    # static runs: 'plus' / 'minus' picks L+/L- and alpha = alpha_c + offset
    variant: Optional[str] = None
    regime: Optional[str] = None
    offset: float = 0.0
    expect: Optional[str] = None
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    seed: int = DEFAULT_SEED
    ic_seed: Optional[int] = None
    num_switches: int = 0
    tau_min: float = 1.0
    graph_cycles: int = 3
    out: Optional[str] = None

    @property
    def switched(self) -> bool:
        return self.graphs == ("fig7",) or len(self.graphs) > 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["graphs"] = list(self.graphs)
        return d

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        if "integrator" in doc:
            doc["integrator"] = IntegratorConfig(**doc["integrator"])
        graphs = doc.get("graphs", doc.pop("graph", None))
        if isinstance(graphs, str):
            graphs = [graphs]
        doc["graphs"] = tuple(graphs or ())
        return cls(**doc)


def _sprott_fig(name, mu, variant, regime, offset, expect):
    return ExperimentConfig(
        experiment=name, node=f"sprott(mu={mu})", graphs=("fig3",), variant=variant, regime=regime,
        offset=offset, expect=expect,
        integrator=IntegratorConfig("rk4", 0.01, t_end=SPROTT_T_END, record_every=100),
    )


def _switched_fig(name, alpha, beta, expect):
    return ExperimentConfig(
        experiment=name, node="cubic", graphs=("fig7",), alpha=alpha, beta=beta, expect=expect,
        integrator=IntegratorConfig("rk4", 0.01, t_end=SWITCHED_T_END, record_every=10),
        num_switches=7, tau_min=1.0,
    )


FIGURES = {
    "fig1": _sprott_fig("fig1", 0.55, "minus", "stable_node", -OFFSET, "Stable"),
    "fig2": _sprott_fig("fig2", 0.55, "minus", "stable_node", +OFFSET, "Unstable"),
    "fig4": _sprott_fig("fig4", 0.0, "plus", "unstable_node", -OFFSET, "Stable"),
    "fig5": _sprott_fig("fig5", 0.0, "plus", "unstable_node", +OFFSET, "Unstable"),
    "fig6": _switched_fig("fig6", -1.0, -1.0, "Stable"),
    "fig8": _switched_fig("fig8", 1.0, -1.0, "Unstable"),
}


def figure_config(name: str, **overrides) -> ExperimentConfig:
    if name not in FIGURES:
        raise InvalidArgument(f"unknown figure {name!r}; choose from {sorted(FIGURES)}")
    cfg = FIGURES[name]
    integ = overrides.pop("integrator", None)
    t_end = overrides.pop("t_end", None)
    if integ is None and t_end is not None:
        integ = replace(cfg.integrator, t_end=t_end)
    if integ is not None:
        overrides["integrator"] = integ
    return replace(cfg, **overrides)


def fig7_graphs(seed: int = DEFAULT_SEED, count: int = 5, n: int = 4, cycles: int = 3) -> list[G.Graph]:
    """Random balanced digraphs standing in for the unpublished switching set."""
    return [G.random_balanced_digraph(n, cycles, seed + k) for k in range(count)]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trajectory: Trajectory
    alpha: float
    beta: float
    spectral: Optional[SpectralReport] = None
    conditions: dict[str, ConditionReport] = field(default_factory=dict)
    signal: Optional[object] = None
    graphs: list = field(default_factory=list)
    files: list[str] = field(default_factory=list)

    @property
    def decayed(self) -> bool:
        return (not self.trajectory.diverged) and self.trajectory.final_norm < 0.1 * self.trajectory.initial_norm

    @property
    def failed_expectation(self) -> bool:
        """Divergence in a run that was expected to be stable."""
        return self.config.expect == "Stable" and self.trajectory.diverged

    def summary(self) -> dict:
        tr = self.trajectory
        doc = {
            "experiment": self.config.experiment,
            "alpha": self.alpha,
            "beta": self.beta,
            "expected": self.config.expect,
            "initial_norm": tr.initial_norm,
            "final_norm": tr.final_norm,
            "diverged": tr.diverged,
            "decayed": self.decayed,
        }
        if self.spectral is not None:
            doc["spectral_verdict"] = self.spectral.verdict
            doc["margin"] = self.spectral.margin
            doc["alpha_c"] = self.spectral.alpha_c
        if self.conditions:
            doc["conditions"] = {k: r.passed for k, r in self.conditions.items()}
        if self.signal is not None:
            doc["switch_times"] = list(self.signal.switch_times)
            doc["modes"] = list(self.signal.modes)
        return doc

    def summary_line(self) -> str:
        s = self.summary()
        if "spectral_verdict" in s:
            claim = f"predicted={s['spectral_verdict']}"
        else:
            met = s["conditions"]["non_positive_divergence"]
            claim = f"sufficient_conditions={'met' if met else 'violated'}"
        return (f"{s['experiment']}: alpha={s['alpha']:.6g} beta={s['beta']:.6g} {claim} "
                f"final_norm={s['final_norm']:.3e} diverged={s['diverged']}")


def _coupling(cfg: ExperimentConfig, node) -> tuple[float, float]:
    if cfg.alpha is not None:
        beta = cfg.beta
        if beta is None:
            if cfg.variant is None:
                raise InvalidArgument("beta or variant required")
            beta = cfg.alpha if cfg.variant == "plus" else -cfg.alpha
        return float(cfg.alpha), float(beta)
    if cfg.variant is None or cfg.regime is None:
        raise InvalidArgument("experiment needs alpha, or a variant and regime to derive it")
    g = G.resolve_graph(cfg.graphs[0])
    alpha = critical_coupling(node, g, cfg.variant, cfg.regime) + cfg.offset
    return alpha, (alpha if cfg.variant == "plus" else -alpha)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    node = parse_node(cfg.node)
    alpha, beta = _coupling(cfg, node)
    coupling = CouplingConfig(alpha, beta)
    ic_seed = cfg.seed if cfg.ic_seed is None else cfg.ic_seed

    if cfg.switched:
        graphs = (fig7_graphs(cfg.seed, cycles=cfg.graph_cycles) if cfg.graphs == ("fig7",)
                  else [G.resolve_graph(s) for s in cfg.graphs])
        ssys = SwitchedNetworkSystem(tuple(graphs), node, coupling)
        sig = random_switching_signal(cfg.num_switches, cfg.integrator.t_end, cfg.tau_min, len(graphs), cfg.seed)
        x0 = random_initial_state(ssys.dim, ic_seed)
        traj = simulate_switched(ssys, sig, x0, cfg.integrator)
        conditions = {
            "common_quadratic": common_quadratic_condition(graphs, alpha, beta),
            "gershgorin": gershgorin_condition(graphs, alpha, beta),
            "non_positive_divergence": non_positive_divergence_condition(graphs, alpha),
            "lyapunov_decrease": lyapunov_decrease_along(traj, sum_of_squares),
        }
        return ExperimentResult(cfg, traj, alpha, beta, conditions=conditions, signal=sig, graphs=graphs)

    g = G.resolve_graph(cfg.graphs[0])
    sys = NetworkSystem(g, node, coupling)
    x0 = random_initial_state(sys.dim, ic_seed)
    traj = simulate_network(sys, x0, cfg.integrator)
    return ExperimentResult(cfg, traj, alpha, beta, spectral=stability_verdict(node, g, coupling), graphs=[g])


def write_outputs(res: ExperimentResult, outdir) -> list[str]:
    """Write CSV, per-channel SVG plots, projection plot and verdict JSON."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    node = parse_node(res.config.node)
    n, d = res.graphs[0].n, node.dim
    tr = res.trajectory
    files = []

    def emit(name, text):
        p = outdir / name
        p.write_text(text)
        files.append(str(p))

    emit("trajectory.csv", tr.to_csv(n, d))
    blocks = tr.states.reshape(len(tr.times), n, d)
    for k in range(d):
        series = [(tr.times, blocks[:, i, k], f"node {i + 1}") for i in range(n)]
        emit(f"channel_{k + 1}.svg", line_plot(series, title=f"{res.config.experiment}: channel {k + 1}",
                                               ylabel=f"x_{k + 1}"))
    if d == 3:
        emit("projection.svg", projection_plot([blocks[:, i, :] for i in range(n)],
                                               title=f"{res.config.experiment}: node trajectories"))
    if res.signal is not None:
        emit("signal.json", res.signal.to_json() + "\n")
        emit("graphs.txt", G.serialize_graphs(res.graphs))
    doc = {"summary": res.summary(), "config": res.config.to_dict()}
    if res.spectral is not None:
        doc["spectral"] = res.spectral.to_dict()
    if res.conditions:
        doc["conditions"] = {k: r.to_dict() for k, r in res.conditions.items()}
    emit("verdict.json", json.dumps(doc, indent=2) + "\n")
    res.files = files
    return files
