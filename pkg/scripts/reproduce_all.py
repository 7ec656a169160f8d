#!/usr/bin/env python3
"""Run every figure experiment and write its artifacts under one directory."""
import argparse
import time
from pathlib import Path

from netstab.experiments import DEFAULT_SEED, FIGURES, figure_config, run_experiment, write_outputs


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--t-end", type=float, help="override the horizon of every run")
    ap.add_argument("figures", nargs="*", default=sorted(FIGURES))
    args = ap.parse_args()

    overrides = {"seed": args.seed}
    if args.t_end is not None:
        overrides["t_end"] = args.t_end
    for name in args.figures:
        start = time.perf_counter()
        res = run_experiment(figure_config(name, **overrides))
        write_outputs(res, Path(args.out) / name)
        print(f"{res.summary_line()} ({time.perf_counter() - start:.1f} s)")


if __name__ == "__main__":
    main()
