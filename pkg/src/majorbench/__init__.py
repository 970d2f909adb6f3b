"""Majorization-based complexity benchmark for simulated gate-model processors."""
from .core import (MixedState, PureState, StateError, apply_kraus, apply_unitary,
                   apply_unitary_mixed, fidelity, probabilities, purity, to_density)
from .gates import GateError, GateKind, GateOp, GateSet, builtin_gate_set, gate_matrix
from .majorization import (FluctuationCurve, MajorizationOrder, distance_to_reference,
                           ensemble_fluctuations, estimate_from_shots, lorenz_cumulants,
                           majorization_compare, rescale_reference, white_noise_transform)
from .noise import (KrausChannel, NoiseSpec, NoisyCircuit, amplitude_damping_channel,
                    dephasing_channel, depolarizing_channel_1q, depolarizing_channel_2q,
                    schedule_gate_errors, schedule_idle_noise, schedule_noise)
from .runner import (ExperimentConfig, ExperimentReport, generate_clifford_reference,
                     generate_haar_reference, load_config, run_experiment)
from .sampler import (Circuit, RngStream, sample_circuit, sample_clifford_circuit,
                      sample_haar_state, sample_separable_state)
from .simulate import simulate_mixed, simulate_pure
from .topology import TopologyGraph, average_connectivity, preset_topology, topology

__version__ = "0.1.0"
