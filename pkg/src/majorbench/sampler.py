"""Seeded random circuits, Clifford reference circuits and random states."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import PureState
from .gates import TWO_PI, GateError, GateOp, GateSet, builtin_gate_set
from .topology import TopologyGraph, complete_graph

PLACEMENT_WEIGHTINGS = ("by_kind", "by_instance")

# stream_id layout: purpose in the top bits, then gate count, then index
_PURPOSE_BITS = 58
_GATES_BITS = 32
DEVICE, HAAR, CLIFFORD, SHOTS, BOOTSTRAP = range(5)


def stream_id(purpose: int, gate_count: int = 0, index: int = 0) -> int:
    if not (0 <= index < 2**_GATES_BITS and 0 <= gate_count < 2 ** (_PURPOSE_BITS - _GATES_BITS)):
        raise ValueError("gate count or index too large for a stream id")
    return (purpose << _PURPOSE_BITS) | (gate_count << _GATES_BITS) | index


@dataclass(frozen=True)
class RngStream:
    """Independent random stream identified by ``(seed, stream_id)``.

    Streams are derived with ``numpy.random.SeedSequence`` spawn keys, so the
    draws depend only on the pair and never on scheduling.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


RngLike = Union[RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


@dataclass
class Circuit:
    """A gate sequence over one gate set, stored as parallel arrays.

    ``targets`` has shape ``(n_ops, 2)`` with ``-1`` padding for one-qubit
    gates; ``angles`` is ``nan`` for fixed gates. ``initial_state`` of ``None``
    means ``|0...0>``.
    """

    n_qubits: int
    gate_set: GateSet
    kind_index: np.ndarray
    targets: np.ndarray
    angles: np.ndarray
    initial_state: Optional[PureState] = None
    _matrices: Optional[list] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.kind_index = np.asarray(self.kind_index, dtype=np.int64).reshape(-1)
        self.targets = np.asarray(self.targets, dtype=np.int64).reshape(-1, 2)
        self.angles = np.asarray(self.angles, dtype=float).reshape(-1)
        if not (len(self.kind_index) == len(self.targets) == len(self.angles)):
            raise ValueError("circuit arrays have mismatched lengths")
        if self.initial_state is not None and self.initial_state.n_qubits != self.n_qubits:
            raise ValueError("initial state has the wrong number of qubits")

    def __len__(self):
        return len(self.kind_index)

    @classmethod
    def from_ops(cls, n_qubits: int, gate_set: GateSet, ops: Sequence[GateOp],
                 initial_state: Optional[PureState] = None) -> "Circuit":
        kinds = list(gate_set.kinds)
        idx, tg, ang = [], [], []
        for op in ops:
            if not any(op.kind is k for k in kinds):
                raise GateError(f"{op.kind.name} is not part of gate set {gate_set.name!r}")
            if max(op.targets) >= n_qubits:
                raise GateError(f"target out of range in {op.targets}")
            idx.append(next(i for i, k in enumerate(kinds) if k is op.kind))
            tg.append(list(op.targets) + [-1] * (2 - len(op.targets)))
            ang.append(np.nan if op.angle is None else op.angle)
        return cls(n_qubits, gate_set, np.array(idx, dtype=np.int64),
                   np.array(tg, dtype=np.int64).reshape(-1, 2), np.array(ang, dtype=float), initial_state)

    @property
    def ops(self) -> list:
        kinds = self.gate_set.kinds
        out = []
        for ki, t, a in zip(self.kind_index.tolist(), self.targets.tolist(), self.angles.tolist()):
            k = kinds[ki]
            out.append(GateOp(k, tuple(t[: k.arity]), None if np.isnan(a) else a))
        return out

    @property
    def arities(self) -> np.ndarray:
        return np.array([k.arity for k in self.gate_set.kinds], dtype=np.int64)[self.kind_index]

    @property
    def durations(self) -> np.ndarray:
        return np.array([k.duration for k in self.gate_set.kinds], dtype=float)[self.kind_index]

    def matrices(self) -> list:
        """Per-op unitaries (computed once, vectorized per kind)."""
        if self._matrices is None:
            mats: list = [None] * len(self)
            for ki, kind in enumerate(self.gate_set.kinds):
                sel = np.flatnonzero(self.kind_index == ki)
                if sel.size == 0:
                    continue
                stack = kind.matrices(np.nan_to_num(self.angles[sel]))
                for j, i in enumerate(sel.tolist()):
                    mats[i] = stack[j]
            self._matrices = mats
        return self._matrices


def _placement_counts(gs: GateSet, topo: TopologyGraph) -> np.ndarray:
    return np.array([topo.n_qubits if k.arity == 1 else 2 * len(topo.edges) for k in gs.kinds], dtype=float)


def sample_circuit(gs: GateSet, topo: TopologyGraph, n_gates: int, rng: RngLike,
                   placement_weighting: str = "by_kind") -> Circuit:
    """Draw ``n_gates`` native gates independently.

    Each draw picks a kind (uniformly, or in proportion to its number of
    placements for ``by_instance``), then a qubit or an edge and orientation,
    then an angle from the kind's domain.
    """
    if n_gates < 0:
        raise ValueError("n_gates must be >= 0")
    if len(gs) == 0:
        raise GateError("empty gate set")
    if gs.max_arity == 2 and not topo.edges:
        raise GateError("two-qubit gates need a topology with at least one edge")
    if placement_weighting not in PLACEMENT_WEIGHTINGS:
        raise ValueError(f"placement_weighting must be one of {PLACEMENT_WEIGHTINGS}")
    gen = as_generator(rng)
    n = topo.n_qubits
    if placement_weighting == "by_kind":
        kind_index = gen.integers(len(gs), size=n_gates)
    else:
        w = _placement_counts(gs, topo)
        kind_index = gen.choice(len(gs), size=n_gates, p=w / w.sum())
    qubit = gen.integers(n, size=n_gates)
    edges = np.array(topo.sorted_edges, dtype=np.int64).reshape(-1, 2)
    edge = gen.integers(max(len(edges), 1), size=n_gates)
    flip = gen.integers(2, size=n_gates)
    u = gen.random(n_gates)

    targets = np.full((n_gates, 2), -1, dtype=np.int64)
    angles = np.full(n_gates, np.nan)
    for ki, kind in enumerate(gs.kinds):
        sel = kind_index == ki
        if kind.arity == 1:
            targets[sel, 0] = qubit[sel]
        else:
            pair = edges[edge[sel]]
            f = flip[sel].astype(bool)
            pair[f] = pair[f, ::-1]
            targets[sel] = pair
        dom = kind.angle_domain
        if dom == "continuous":
            angles[sel] = TWO_PI * u[sel]
        elif dom is not None:
            choices = np.asarray(dom, dtype=float)
            angles[sel] = choices[np.minimum((u[sel] * len(choices)).astype(np.int64), len(choices) - 1)]
    return Circuit(n, gs, kind_index, targets, angles)


def sample_haar_states(n: int, count: int, rng: RngLike) -> np.ndarray:
    """``count`` Haar-random amplitude vectors, shape ``(count, 2**n)``."""
    gen = as_generator(rng)
    z = gen.standard_normal((count, 2**n)) + 1j * gen.standard_normal((count, 2**n))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sample_haar_state(n: int, rng: RngLike) -> PureState:
    """Normalized vector of iid standard complex Gaussian amplitudes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return PureState(n, sample_haar_states(n, 1, rng)[0])


def sample_separable_state(n: int, rng: RngLike) -> PureState:
    """Product of ``n`` independent Haar single-qubit states."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = as_generator(rng)
    cos_t = gen.uniform(-1.0, 1.0, size=n)
    phi = gen.uniform(0.0, TWO_PI, size=n)
    a0 = np.sqrt((1 + cos_t) / 2)
    a1 = np.sqrt((1 - cos_t) / 2) * np.exp(1j * phi)
    amps = np.ones(1, dtype=complex)
    # qubit 0 is the least significant bit, so it goes last in the Kronecker product
    for q in range(n):
        amps = np.kron(np.array([a0[q], a1[q]]), amps)
    return PureState(n, amps / np.linalg.norm(amps))


def clifford_gate_set(n: int) -> GateSet:
    gs = builtin_gate_set("clifford")
    if n == 1:
        return GateSet("clifford", tuple(k for k in gs.kinds if k.arity == 1))
    return gs


def sample_clifford_circuit(n: int, n_gates: int, rng: RngLike) -> Circuit:
    """Random {H, S, CNOT} circuit on an all-to-all register from a random product state.

    A single qubit has no CNOT placements, so ``n == 1`` uses {H, S}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = as_generator(rng)
    start = sample_separable_state(n, gen)
    c = sample_circuit(clifford_gate_set(n), complete_graph(n), n_gates, gen)
    c.initial_state = start
    return c
