"""Idle and gate noise on the 7-qubit H-shaped device.

Prints mean purity and fidelity for a few noise settings and shows how the
fluctuation curve flattens as the output drifts toward the maximally mixed
state. Uses small ensembles so it finishes in a couple of minutes.
"""
from majorbench import (ExperimentConfig, NoiseSpec, builtin_gate_set, preset_topology,
                        run_experiment)
from majorbench.runner import ReferenceConfig

SETTINGS = [
    ("noiseless", NoiseSpec()),
    ("T2 = 1 ms", NoiseSpec.idle_dephasing(1e6)),
    ("T1 = 100 us", NoiseSpec.idle_damping(1e5)),
    ("eps = (1e-4, 1e-4)", NoiseSpec.depolarizing(1e-4, 1e-4)),
    ("eps = (1e-2, 1e-6)", NoiseSpec.depolarizing(1e-2, 1e-6)),
]


def main():
    print(f"{'noise':20s} {'purity':>7s} {'fidelity':>8s} {'D_haar':>7s} {'max std':>8s}")
    for label, spec in SETTINGS:
        cfg = ExperimentConfig(builtin_gate_set("ibm"), preset_topology("h7"), (600,), 150,
                               noise=spec, references=ReferenceConfig(haar_samples=2000), seed=3)
        r = run_experiment(cfg).results[0]
        pur = "-" if r.mean_purity is None else f"{r.mean_purity:.3f}"
        fid = "-" if r.mean_fidelity is None else f"{r.mean_fidelity:.3f}"
        print(f"{label:20s} {pur:>7s} {fid:>8s} {r.distances['haar']:7.3f} {r.curve.values.max():8.4f}")


if __name__ == "__main__":
    main()
