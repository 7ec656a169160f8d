#!/usr/bin/env python3
"""Spectral margin of the fig3 network as the coupling strength varies.

Sweeps alpha through both regimes (diffusive coupling with stable nodes,
signless coupling with unstable nodes), prints where the margin changes
sign and writes one SVG per regime.
"""
import argparse
from pathlib import Path

import numpy as np

from netstab import graph as G
from netstab.dynamics import sprott_circulant
from netstab.spectral import CouplingConfig, critical_coupling, stability_verdict
from netstab.svg import line_plot

REGIMES = {
    "stable_node": (0.55, "minus", (-0.05, 0.05)),
    "unstable_node": (0.0, "plus", (-1.2, 0.0)),
}


def sweep(mu, sign, lo, hi, points):
    node, g = sprott_circulant(mu), G.fig3_graph()
    alphas = np.linspace(lo, hi, points)
    make = CouplingConfig.signless if sign == "plus" else CouplingConfig.diffusive
    margins = np.array([stability_verdict(node, g, make(a)).margin for a in alphas])
    return alphas, margins


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=401)
    ap.add_argument("--out", default="results/sweep")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for regime, (mu, sign, (lo, hi)) in REGIMES.items():
        alphas, margins = sweep(mu, sign, lo, hi, args.points)
        crossings = alphas[1:][np.diff(np.sign(margins)) != 0]
        ac = critical_coupling(sprott_circulant(mu), G.fig3_graph(), sign, regime)
        print(f"{regime}: alpha_c = {ac:.10f}, sampled sign changes near {np.round(crossings, 4).tolist()}")
        svg = line_plot([(alphas, margins, "margin"), (alphas, np.zeros_like(alphas), "0")],
                        title=f"{regime} (mu = {mu}, L{'+' if sign == 'plus' else '-'})",
                        xlabel="alpha", ylabel="max Re eigenvalue")
        (out / f"{regime}.svg").write_text(svg)


if __name__ == "__main__":
    main()
