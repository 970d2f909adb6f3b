"""Denser coupling graphs reach the Haar-8 curve with fewer gates.

Compares the ring, the degree-4 circulant and the complete graph on eight
qubits with the Rigetti gate set, and prints the average connectivity next
to the distance so the trend is visible at a glance.
"""
import numpy as np

from majorbench import (ExperimentConfig, average_connectivity, builtin_gate_set, preset_topology,
                        run_experiment)
from majorbench.runner import ReferenceConfig, ReferenceCurve, generate_haar_reference
from majorbench.sampler import HAAR, RngStream, stream_id

SEED = 11
SIZE = 600
GATES = (200, 500, 900)


def main():
    haar = ReferenceCurve("haar", generate_haar_reference(8, 2000, RngStream(SEED, stream_id(HAAR))), SEED)
    rows = []
    for name in ("ring8", "k4_8", "k6_8", "all8"):
        topo = preset_topology(name)
        cfg = ExperimentConfig(builtin_gate_set("rigetti"), topo, GATES, SIZE,
                               references=ReferenceConfig(haar=False), seed=SEED)
        rep = run_experiment(cfg, references={"haar": haar})
        rows.append((name, average_connectivity(topo), [rep.result(g).distances["haar"] for g in GATES]))

    print("topology  n_c  " + "  ".join(f"D({g})" for g in GATES))
    for name, nc, d in rows:
        print(f"{name:8s} {nc:4.1f}  " + "  ".join(f"{x:6.3f}" for x in d))
    # the graphs are listed in order of increasing connectivity
    print("monotone at", GATES[1], "gates:", bool(np.all(np.diff([r[2][1] for r in rows]) < 0)))


if __name__ == "__main__":
    main()
