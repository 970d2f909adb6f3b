"""Noiseless 5-qubit IBM circuits approach the Haar-5 curve as gates are added.

Run with ``python demos/convergence_5q.py``; takes well under a minute with
the default sizes. Pass ``--full`` for 5000-member ensembles.
"""
import argparse

from majorbench import (ExperimentConfig, builtin_gate_set, preset_topology, run_experiment)
from majorbench.runner import ReferenceConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--full", action="store_true")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    size = 5000 if args.full else 800

    cfg = ExperimentConfig(
        gate_set=builtin_gate_set("ibm"),
        topology=preset_topology("bowtie5"),
        gate_counts=(25, 50, 100, 150, 200, 300),
        ensemble_size=size,
        references=ReferenceConfig(haar_samples=size, cliff=True, cliff_ensemble_size=size // 2),
        seed=args.seed,
        bootstrap=100,
    )
    report = run_experiment(cfg)
    print(f"{'gates':>6} {'D_haar':>9} {'+-':>7} {'D_cliff':>9}")
    for r in report.results:
        print(f"{r.gate_count:6d} {r.distances['haar']:9.4f} {r.distance_se['haar']:7.4f} "
              f"{r.distances['cliff']:9.4f}")
    cliff = report.references["cliff"]
    print(f"Clifford reference converged at {cliff.gate_count} gates")


if __name__ == "__main__":
    main()
