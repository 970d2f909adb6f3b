"""Circuit evolution on the statevector and density-matrix backends.

Circuits are lowered to a flat program (bit lists plus row-major matrices)
and run in one compiled call. On the density-matrix path a gate immediately
followed by channels on the same qubits is fused into a single
superoperator.
"""
from __future__ import annotations

from typing import Union

import numpy as np

from . import _kernels
from .core import MixedState, PureState, apply_kraus, apply_unitary_mixed, to_density
from .noise import NoisyCircuit
from .sampler import Circuit


class _Program:
    def __init__(self):
        self.bits: list = []
        self.mats: list = []

    def add(self, bits, m):
        self.bits.append(bits)
        self.mats.append(m)

    def run(self, vec: np.ndarray) -> None:
        if not self.bits:
            return
        lens = np.fromiter((len(b) for b in self.bits), dtype=np.int64, count=len(self.bits))
        bit_ptr = np.zeros(len(lens) + 1, dtype=np.int64)
        np.cumsum(lens, out=bit_ptr[1:])
        bits = np.fromiter((q for b in self.bits for q in b), dtype=np.int64, count=int(bit_ptr[-1]))
        sizes = np.left_shift(1, 2 * lens)
        mat_ptr = np.zeros(len(lens), dtype=np.int64)
        np.cumsum(sizes[:-1], out=mat_ptr[1:])
        data = np.concatenate([np.asarray(m, dtype=np.complex128).reshape(-1) for m in self.mats])
        _kernels.run_program(vec, bit_ptr, bits, mat_ptr, data)


def _op_targets(c: Circuit) -> list:
    return [tuple(t for t in row if t >= 0) for row in c.targets.tolist()]


def _initial_amplitudes(c: Circuit) -> np.ndarray:
    if c.initial_state is not None:
        return c.initial_state.amplitudes.copy()
    amps = np.zeros(2**c.n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return amps


def evolve_pure(c: Circuit) -> np.ndarray:
    """Final amplitudes of ``c`` applied to its initial state."""
    amps = _initial_amplitudes(c)
    prog = _Program()
    for tg, m in zip(_op_targets(c), c.matrices()):
        prog.add(tg, m)
    prog.run(amps)
    return amps


def simulate_pure(c: Circuit) -> PureState:
    return PureState(c.n_qubits, evolve_pure(c))


_FUSED: dict = {}


def _superops(kind, us: np.ndarray, channels: tuple) -> np.ndarray:
    """Batched ``S_chan ... S_chan @ (U (x) conj U)`` for a stack of unitaries."""
    if not kind.parametric:
        key = (kind, channels)
        s = _FUSED.get(key)
        if s is None:
            s = np.kron(us[0], us[0].conj())
            for ch in channels:
                s = ch.superoperator @ s
            s = _FUSED[key] = np.ascontiguousarray(s)
        return np.broadcast_to(s, (len(us),) + s.shape)
    m, d, _ = us.shape
    s = (us[:, :, None, :, None] * us.conj()[:, None, :, None, :]).reshape(m, d * d, d * d)
    for ch in channels:
        s = ch.superoperator @ s
    return s


def evolve_mixed(noisy: Union[NoisyCircuit, Circuit], fuse: bool = True) -> np.ndarray:
    """Final density matrix of a (possibly noisy) circuit, as an ``N x N`` array."""
    if isinstance(noisy, Circuit):
        noisy = NoisyCircuit(noisy, [])
    c = noisy.base
    n = c.n_qubits
    n_ops = len(c)
    psi = _initial_amplitudes(c)
    vec = np.outer(psi, psi.conj()).reshape(-1)
    entries = noisy.interleaved
    targets = _op_targets(c)
    kind_index = c.kind_index.tolist()
    mats = c.matrices()

    # plan: per position, channels before the gate; per gate, channels fused after it
    before: list = [[] for _ in range(n_ops + 1)]
    follow: list = [()] * n_ops
    j = 0
    for i in range(n_ops + 1):
        while j < len(entries) and entries[j][0] == i:
            before[i].append(entries[j])
            j += 1
        if fuse and i < n_ops:
            fused = []
            while j < len(entries) and entries[j][0] == i + 1 and tuple(entries[j][2]) == targets[i]:
                fused.append(entries[j][1])
                j += 1
            follow[i] = tuple(fused)

    superops: list = [None] * n_ops
    groups: dict = {}
    for i, chans in enumerate(follow):
        if chans:
            groups.setdefault((kind_index[i], chans), []).append(i)
    kinds = c.gate_set.kinds
    for (ki, chans), idx in groups.items():
        stack = _superops(kinds[ki], np.stack([mats[i] for i in idx]), chans)
        for i, sop in zip(idx, stack):
            superops[i] = sop

    prog = _Program()
    for i in range(n_ops + 1):
        for _, ch, tg in before[i]:
            prog.add([q + n for q in tg] + list(tg), ch.superoperator)
        if i == n_ops:
            break
        tg = targets[i]
        if superops[i] is not None:
            prog.add([q + n for q in tg] + list(tg), superops[i])
        else:
            prog.add([q + n for q in tg], mats[i])
            prog.add(list(tg), np.conj(mats[i]))
    prog.run(vec)
    return vec.reshape(2**n, 2**n)


def simulate_mixed(noisy: Union[NoisyCircuit, Circuit], fuse: bool = True) -> MixedState:
    return MixedState(noisy.n_qubits, evolve_mixed(noisy, fuse=fuse))


def simulate_mixed_reference(noisy: Union[NoisyCircuit, Circuit]) -> MixedState:
    """Op-by-op evolution through the public state API (slow; for testing)."""
    if isinstance(noisy, Circuit):
        noisy = NoisyCircuit(noisy, [])
    c = noisy.base
    start = c.initial_state if c.initial_state is not None else PureState.zero(c.n_qubits)
    rho = to_density(start)
    entries = noisy.interleaved
    j = 0
    for i, (tg, u) in enumerate(zip(_op_targets(c) + [None], c.matrices() + [None])):
        while j < len(entries) and entries[j][0] == i:
            rho = apply_kraus(rho, entries[j][1], entries[j][2])
            j += 1
        if tg is not None:
            rho = apply_unitary_mixed(rho, u, tg)
    return rho
