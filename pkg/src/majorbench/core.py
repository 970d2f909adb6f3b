"""Dense n-qubit pure and mixed states.

Qubit 0 is the least significant bit of the computational-basis index. Small
operators are applied in place through strided kernels; no full ``2**n``
operator is ever built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _kernels


class StateError(ValueError):
    pass


@dataclass
class PureState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_qubits,):
            raise StateError(f"expected {2**self.n_qubits} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise StateError("non-finite amplitude")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-10:
            raise StateError(f"state not normalized (norm {np.linalg.norm(amps)})")
        self.amplitudes = amps

    @classmethod
    def zero(cls, n_qubits: int) -> "PureState":
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def copy(self) -> "PureState":
        return PureState(self.n_qubits, self.amplitudes.copy())

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


@dataclass
class MixedState:
    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        rho = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        dim = 2**self.n_qubits
        if rho.shape != (dim, dim):
            raise StateError(f"expected {dim}x{dim} density matrix, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise StateError("non-finite density matrix entry")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise StateError("density matrix not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-10:
            raise StateError(f"trace {np.trace(rho).real} != 1")
        self.matrix = rho

    @classmethod
    def zero(cls, n_qubits: int) -> "MixedState":
        return to_density(PureState.zero(n_qubits))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "MixedState":
        dim = 2**n_qubits
        return cls(n_qubits, np.eye(dim, dtype=np.complex128) / dim)

    def copy(self) -> "MixedState":
        return MixedState(self.n_qubits, self.matrix.copy())

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def check_psd(self, atol: float = 1e-8) -> None:
        """Raise unless the smallest eigenvalue is >= -atol (debug/test use)."""
        lo = np.linalg.eigvalsh(self.matrix).min()
        if lo < -atol:
            raise StateError(f"density matrix has eigenvalue {lo}")


State = Union[PureState, MixedState]


def _check_targets(targets: Sequence[int], n_qubits: int, dim: int) -> np.ndarray:
    t = np.asarray(targets, dtype=np.int64).reshape(-1)
    if len(set(t.tolist())) != t.size:
        raise StateError(f"repeated target in {list(targets)}")
    if t.size and (t.min() < 0 or t.max() >= n_qubits):
        raise StateError(f"target out of range for {n_qubits} qubits: {list(targets)}")
    if dim != 2**t.size:
        raise StateError(f"operator of size {dim} does not match {t.size} target(s)")
    return t


def _check_unitary(matrix: np.ndarray) -> np.ndarray:
    m = np.ascontiguousarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateError(f"expected a square matrix, got shape {m.shape}")
    if not np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=1e-10, rtol=0):
        raise StateError("matrix is not unitary")
    return m


def apply_unitary(state: PureState, matrix: np.ndarray, targets: Sequence[int]) -> PureState:
    """Return ``U|psi>`` with ``U`` on ``targets`` (``targets[0]`` most significant)."""
    m = _check_unitary(matrix)
    bits = _check_targets(targets, state.n_qubits, m.shape[0])
    out = state.amplitudes.copy()
    _kernels.apply_matrix(out, bits, m)
    return PureState(state.n_qubits, out)


def apply_unitary_mixed(rho: MixedState, matrix: np.ndarray, targets: Sequence[int]) -> MixedState:
    """Return ``U rho U^dagger``."""
    m = _check_unitary(matrix)
    bits = _check_targets(targets, rho.n_qubits, m.shape[0])
    vec = rho.matrix.copy().reshape(-1)
    _kernels.apply_matrix(vec, bits + rho.n_qubits, m)
    _kernels.apply_matrix(vec, bits, np.ascontiguousarray(m.conj()))
    return MixedState(rho.n_qubits, vec.reshape(rho.dim, rho.dim))


def superoperator_bits(targets: np.ndarray, n_qubits: int) -> np.ndarray:
    """Bits of ``vec(rho)`` touched by a channel on ``targets``: rows first, then columns."""
    targets = np.asarray(targets, dtype=np.int64)
    return np.concatenate([targets + n_qubits, targets])


def apply_kraus(rho: MixedState, channel, targets: Sequence[int]) -> MixedState:
    """Return ``sum_m K_m rho K_m^dagger`` for a :class:`~majorbench.noise.KrausChannel`."""
    if len(targets) != channel.arity:
        raise StateError(f"channel arity {channel.arity} but {len(targets)} target(s) given")
    bits = _check_targets(targets, rho.n_qubits, 2**channel.arity)
    vec = rho.matrix.copy().reshape(-1)
    _kernels.apply_matrix(vec, superoperator_bits(bits, rho.n_qubits), channel.superoperator)
    return MixedState(rho.n_qubits, vec.reshape(rho.dim, rho.dim))


def clean_probabilities(p: np.ndarray, atol: float = 1e-9) -> np.ndarray:
    """Clamp negative round-off to zero and renormalize if needed.

    Works on a single vector or on a stack of vectors (last axis).
    """
    p = np.array(p, dtype=float)
    if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
        raise StateError("probability entry outside [0, 1]")
    np.clip(p, 0.0, None, out=p)
    total = p.sum(axis=-1, keepdims=True)
    if np.any(np.abs(total - 1.0) > atol):
        raise StateError("probabilities do not sum to 1")
    if np.any(np.abs(total - 1.0) > 1e-12):
        p /= total
    return p


def probabilities(state: State) -> np.ndarray:
    """Computational-basis outcome distribution."""
    if isinstance(state, PureState):
        raw = np.abs(state.amplitudes) ** 2
    elif isinstance(state, MixedState):
        raw = np.real(np.diagonal(state.matrix))
    else:
        raise TypeError(f"not a state: {type(state).__name__}")
    return clean_probabilities(raw)


def purity(rho: MixedState) -> float:
    """``Tr(rho^2)``; for Hermitian ``rho`` this is the squared Frobenius norm."""
    m = rho.matrix
    return float(np.vdot(m, m).real)


def fidelity(psi: PureState, rho: MixedState) -> float:
    """``<psi|rho|psi>`` (no square root)."""
    if psi.n_qubits != rho.n_qubits:
        raise StateError(f"dimension mismatch: {psi.n_qubits} vs {rho.n_qubits} qubits")
    a = psi.amplitudes
    return float(np.vdot(a, rho.matrix @ a).real)


def to_density(psi: PureState) -> MixedState:
    a = psi.amplitudes
    return MixedState(psi.n_qubits, np.outer(a, a.conj()))
