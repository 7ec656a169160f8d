"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 numerical failure or a
stability expectation that did not hold.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import graph as G
from .dynamics import NetworkSystem, parse_node
from .errors import InvalidArgument, MarginalNode, NetstabError, NotStabilizable, NumericalFailure
from .experiments import DEFAULT_SEED, FIGURES, ExperimentConfig, figure_config, fig7_graphs, run_experiment, write_outputs
from .lyapunov import common_quadratic_condition, gershgorin_condition, non_positive_divergence_condition
from .sim import (IntegratorConfig, SwitchedNetworkSystem, random_initial_state, random_switching_signal,
                  simulate_network, simulate_switched)
from .spectral import (CouplingConfig, critical_coupling, eigenvalues, network_laplacian, node_spectrum,
                       stability_verdict)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(text: str, out=None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _resolve_coupling(alpha, beta, variant):
    if alpha is None:
        alpha = 0.0
    if beta is None:
        if variant is None:
            raise InvalidArgument("give --beta or --variant")
        beta = alpha if variant == "plus" else -alpha
    return float(alpha), float(beta)


def _graph_list(spec: str, seed: int):
    if spec == "fig7":
        return fig7_graphs(seed)
    p = Path(spec)
    if p.is_file():
        return G.parse_graphs(p.read_text())
    return [G.resolve_graph(s) for s in spec.split(",")]


def cmd_analyze(args) -> int:
    g = G.resolve_graph(args.graph)
    node = parse_node(args.node)
    alpha, beta = _resolve_coupling(args.alpha, args.beta, args.variant)
    report = stability_verdict(node, g, CouplingConfig(alpha, beta), tol=args.tol)
    nu_max = float(node_spectrum(node).real.max())
    regime = "stable_node" if nu_max < 0 else "unstable_node"
    by_variant = {}
    for sign in ("plus", "minus"):
        try:
            by_variant[sign] = critical_coupling(node, g, sign, regime)
        except NotStabilizable:
            by_variant[sign] = None
            report.notes.append(f"L{'+' if sign == 'plus' else '-'}: not stabilizable by coupling alone")
        except MarginalNode as exc:
            by_variant[sign] = None
            report.notes.append(str(exc))
    variant = args.variant
    if variant is not None:
        report.alpha_c = by_variant[variant]
        lam = eigenvalues(network_laplacian(g, variant)).real
        report.lambda_min, report.lambda_max = float(lam.min()), float(lam.max())
    doc = report.to_dict()
    doc.update({
        "graph": args.graph, "node": node.name, "alpha": alpha, "beta": beta,
        "variant": variant, "regime": regime, "alpha_c_by_variant": by_variant,
    })
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.config:
        configs = [ExperimentConfig.from_dict(json.loads(Path(args.config).read_text()))]
    else:
        names = sorted(FIGURES) if args.all or args.figure is None else [args.figure]
        overrides = {"seed": args.seed}
        if args.t_end is not None:
            overrides["t_end"] = args.t_end
        if args.ic_seed is not None:
            overrides["ic_seed"] = args.ic_seed
        configs = [figure_config(name, **overrides) for name in names]
    outroot = Path(args.out or "results")
    status = EXIT_OK
    for cfg in configs:
        res = run_experiment(cfg)
        outdir = outroot / cfg.experiment if len(configs) > 1 or not args.out else outroot
        write_outputs(res, outdir)
        print(res.summary_line())
        if res.failed_expectation:
            print(f"{cfg.experiment}: diverged although stability was expected", file=sys.stderr)
            status = EXIT_NUMERIC
    return status


def cmd_check(args) -> int:
    graphs = _graph_list(args.graphs, args.seed)
    reports = {
        "common_quadratic": common_quadratic_condition(graphs, args.alpha, args.beta),
        "gershgorin": gershgorin_condition(graphs, args.alpha, args.beta),
        "non_positive_divergence": non_positive_divergence_condition(graphs, args.alpha),
    }
    doc = {k: r.to_dict() for k, r in reports.items()}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def _graph_info(g: G.Graph) -> dict:
    prof = G.degree_profile(g)
    return {
        "n": g.n,
        "directed": g.directed,
        "edges": g.edge_count,
        "connected": G.is_connected(g),
        "bipartite": G.is_bipartite(g),
        "k_in": list(prof.k_in),
        "k_out": list(prof.k_out),
        "non_positive_divergence": G.is_non_positive_divergence(g),
        "balanced": G.is_balanced(g),
    }


def cmd_graph(args) -> int:
    if args.graph_cmd == "gen":
        if args.balanced:
            if args.cycles is None:
                raise InvalidArgument("--balanced needs --cycles")
            graphs = [G.random_balanced_digraph(args.n, args.cycles, args.seed + k) for k in range(args.count)]
        else:
            if args.family is None:
                raise InvalidArgument("give --family or --balanced")
            graphs = [G.resolve_graph(f"{args.family}{args.n}")]
        _emit(G.serialize_graphs(graphs), args.out)
        return EXIT_OK
    infos = [_graph_info(g) for g in _graph_list(args.spec, args.seed)]
    if args.format == "json":
        _emit(json.dumps(infos if len(infos) > 1 else infos[0], indent=2) + "\n", args.out)
        return EXIT_OK
    lines = []
    for info in infos:
        degrees = " ".join(str(k) for k in info["k_in"])
        if info["directed"]:
            degrees = f"in {degrees} out " + " ".join(str(k) for k in info["k_out"])
        lines.append(", ".join([
            "connected" if info["connected"] else "disconnected",
            "bipartite" if info["bipartite"] else "non-bipartite",
            f"degrees {degrees}",
            "balanced" if info["balanced"] else "unbalanced",
        ]))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.config:
        doc = json.loads(Path(args.config).read_text())
        cfg = ExperimentConfig.from_dict({"experiment": doc.pop("experiment", "simulate"), **doc})
        node_spec, graph_specs, integ = cfg.node, list(cfg.graphs), cfg.integrator
        alpha, beta = _resolve_coupling(cfg.alpha, cfg.beta, cfg.variant)
        seed, switches, tau_min = cfg.seed, cfg.num_switches, cfg.tau_min
    else:
        if not args.graph or not args.node:
            raise InvalidArgument("simulate needs --graph and --node (or --config)")
        node_spec, graph_specs = args.node, args.graph
        integ = IntegratorConfig(args.method, args.dt, args.rtol, args.atol, args.t_end, args.record_every)
        alpha, beta = _resolve_coupling(args.alpha, args.beta, args.variant)
        seed, switches, tau_min = args.seed, args.switches, args.tau_min
    node = parse_node(node_spec)
    graphs = []
    for spec in graph_specs:
        graphs.extend(_graph_list(spec, seed))
    coupling = CouplingConfig(alpha, beta)
    n = graphs[0].n
    if args.x0:
        x0 = np.array([float(v) for v in args.x0.split(",")])
    else:
        x0 = random_initial_state(n * node.dim, seed)
    signal = None
    if len(graphs) > 1:
        ssys = SwitchedNetworkSystem(tuple(graphs), node, coupling)
        signal = random_switching_signal(switches, integ.t_end, tau_min, len(graphs), seed)
        traj = simulate_switched(ssys, signal, x0, integ)
    else:
        traj = simulate_network(NetworkSystem(graphs[0], node, coupling), x0, integ)
    if args.format == "json":
        doc = {"times": traj.times.tolist(), "states": traj.states.tolist(), "diverged": traj.diverged,
               "final_norm": traj.final_norm}
        if signal is not None:
            doc["signal"] = json.loads(signal.to_json())
        _emit(json.dumps(doc) + "\n", args.out)
    else:
        _emit(traj.to_csv(n, node.dim), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for every random draw")
    common.add_argument("--out", default=None, help="output file (or directory for reproduce)")
    common.add_argument("--format", choices=["json", "csv", "text"], default=None)

    p = _Parser(prog="netstab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="spectral stability report")
    a.add_argument("--graph", required=True)
    a.add_argument("--node", required=True)
    a.add_argument("--variant", choices=["plus", "minus"])
    a.add_argument("--alpha", type=float)
    a.add_argument("--beta", type=float)
    a.add_argument("--tol", type=float, default=1e-9)
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("reproduce", parents=[common], help="rerun a figure experiment")
    r.add_argument("--figure", choices=sorted(FIGURES))
    r.add_argument("--all", action="store_true")
    r.add_argument("--t-end", type=float)
    r.add_argument("--ic-seed", type=int)
    r.add_argument("--config", help="JSON experiment config")
    r.set_defaults(func=cmd_reproduce)

    c = sub.add_parser("check", parents=[common], help="switched-stability sufficient conditions")
    c.add_argument("--graphs", required=True, help="edge-list file, comma list of named graphs, or fig7")
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--beta", type=float, required=True)
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("graph", help="generate or inspect graphs")
    gsub = g.add_subparsers(dest="graph_cmd", required=True, parser_class=_Parser)
    gen = gsub.add_parser("gen", parents=[common])
    gen.add_argument("--family", choices=["path", "star", "cycle", "complete"])
    gen.add_argument("--balanced", action="store_true")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--cycles", type=int)
    gen.add_argument("--count", type=int, default=1)
    info = gsub.add_parser("info", parents=[common])
    info.add_argument("spec")
    g.set_defaults(func=cmd_graph)

    s = sub.add_parser("simulate", parents=[common], help="integrate a (switched) network")
    s.add_argument("--graph", action="append", help="repeat for a switched system")
    s.add_argument("--node")
    s.add_argument("--variant", choices=["plus", "minus"])
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--method", choices=["rk4", "dp54"], default="rk4")
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("--rtol", type=float, default=1e-6)
    s.add_argument("--atol", type=float, default=1e-9)
    s.add_argument("--t-end", type=float, default=10.0)
    s.add_argument("--record-every", type=int, default=1)
    s.add_argument("--switches", type=int, default=0)
    s.add_argument("--tau-min", type=float, default=1.0)
    s.add_argument("--x0", help="comma-separated joint initial state")
    s.add_argument("--config", help="JSON experiment config")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"netstab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidArgument, OSError, json.JSONDecodeError, TypeError) as exc:
        print(f"netstab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalFailure, MarginalNode, NetstabError) as exc:
        print(f"netstab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
