#!/usr/bin/env python3
"""Largest Lyapunov exponent of an isolated Sprott node (diagnostic only).

A positive estimate suggests chaotic dynamics; an estimate near zero is
consistent with a limit cycle or quasi-periodic motion.
"""
import argparse

import numpy as np

from netstab.dynamics import sprott_circulant
from netstab.sim import largest_lyapunov_exponent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, nargs="+", default=[0.0, 0.55])
    ap.add_argument("--t-end", type=float, default=500.0)
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()

    for g in ("tanh", "sin"):
        for mu in args.mu:
            node = sprott_circulant(mu, g)
            rng = np.random.default_rng(0)
            est = [largest_lyapunov_exponent(node, rng.uniform(-1, 1, 3), t_end=args.t_end)
                   for _ in range(args.seeds)]
            print(f"g={g:4s} mu={mu:<5g} lambda_max ~ {np.mean(est):+.4f} (spread {np.ptp(est):.1e})")


if __name__ == "__main__":
    main()
