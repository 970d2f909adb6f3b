"""Kraus channels and the schedulers that interleave them into circuits.

Times are in nanoseconds throughout this module.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .gates import GateSet
from .sampler import Circuit

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
PAULIS = (I2, X, Y, Z)

IDLE_SCHEDULES = ("asap", "sequential")


class NoiseError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KrausChannel:
    arity: int
    operators: tuple
    name: str = "kraus"

    def __post_init__(self):
        d = 2**self.arity
        ops = tuple(np.array(k, dtype=complex) for k in self.operators)
        if not ops:
            raise NoiseError("channel needs at least one Kraus operator")
        for k in ops:
            if k.shape != (d, d):
                raise NoiseError(f"Kraus operator of shape {k.shape} for arity {self.arity}")
            k.setflags(write=False)
        object.__setattr__(self, "operators", ops)
        err = self.completeness_error()
        if err > 1e-12:
            raise NoiseError(f"Kraus operators not complete (error {err:.2e})")

    def completeness_error(self) -> float:
        d = 2**self.arity
        total = sum(k.conj().T @ k for k in self.operators)
        return float(np.max(np.abs(total - np.eye(d))))

    @property
    def superoperator(self) -> np.ndarray:
        """``sum_m K_m (x) conj(K_m)``, acting on row-major ``vec(rho)``."""
        s = self.__dict__.get("_superop")
        if s is None:
            s = sum(np.kron(k, k.conj()) for k in self.operators)
            s = np.ascontiguousarray(s)
            s.setflags(write=False)
            object.__setattr__(self, "_superop", s)
        return s

    def __repr__(self):
        return f"KrausChannel({self.name}, arity={self.arity}, n_ops={len(self.operators)})"


def _check_unit(name: str, x: float, hi: float = 1.0) -> float:
    x = float(x)
    if not 0.0 <= x <= hi:
        raise NoiseError(f"{name}={x} outside [0, {hi}]")
    return x


def identity_channel(arity: int = 1) -> KrausChannel:
    return KrausChannel(arity, (np.eye(2**arity),), "identity")


def amplitude_damping_channel(p: float) -> KrausChannel:
    p = _check_unit("p", p)
    d0 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    d1 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
    return KrausChannel(1, (d0, d1), f"amplitude_damping({p:.6g})")


def dephasing_channel(p: float) -> KrausChannel:
    """Phase flip with probability ``p``; coherences scale by ``1 - 2p``."""
    p = _check_unit("p", p, 0.5)
    return KrausChannel(1, (np.sqrt(1 - p) * I2, np.sqrt(p) * Z), f"dephasing({p:.6g})")


def depolarizing_channel_1q(eps: float) -> KrausChannel:
    eps = _check_unit("eps1", eps)
    ops = [np.sqrt(1 - eps) * I2] + [np.sqrt(eps / 3) * P for P in PAULIS[1:]]
    return KrausChannel(1, tuple(ops), f"depolarizing_1q({eps:.6g})")


def depolarizing_channel_2q(eps: float) -> KrausChannel:
    eps = _check_unit("eps2", eps)
    ops = []
    for i, a in enumerate(PAULIS):
        for j, b in enumerate(PAULIS):
            c = np.sqrt(1 - eps) if i == j == 0 else np.sqrt(eps / 15)
            ops.append(c * np.kron(a, b))
    return KrausChannel(2, tuple(ops), f"depolarizing_2q({eps:.6g})")


def idle_probability(duration: float, variant: str, time_constant: float) -> float:
    """Error parameter of an idle window.

    ``damping``: ``p = 1 - exp(-t/T1)``. ``dephasing``:
    ``p = (1 - exp(-t/T2)) / 2`` so coherences decay as ``exp(-t/T2)``.
    """
    if duration < 0:
        raise NoiseError("negative duration")
    if time_constant <= 0:
        raise NoiseError("time constant must be > 0")
    decay = np.exp(-duration / time_constant)
    if variant == "damping":
        return float(1.0 - decay)
    if variant == "dephasing":
        return float(0.5 * (1.0 - decay))
    raise NoiseError(f"unknown idle variant {variant!r}")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise model of a run.

    ``variant`` is one of ``none``, ``idle_damping`` (uses ``t1``),
    ``idle_dephasing`` (``t2``), ``depolarizing`` (``eps1``, ``eps2``) or
    ``white_noise`` (``f``). ``t1``/``t2`` are in ns.

    ``idle_schedule`` picks how idle windows are derived from gate durations;
    ``instant_gate_errors`` controls whether zero-duration gates (RZ) are
    followed by a depolarizing error.
    """

    variant: str = "none"
    t1: Optional[float] = None
    t2: Optional[float] = None
    eps1: float = 0.0
    eps2: float = 0.0
    f: float = 1.0
    idle_schedule: str = "asap"
    instant_gate_errors: bool = True

    def __post_init__(self):
        v = self.variant
        if v == "idle_damping":
            if self.t1 is None or self.t1 <= 0:
                raise NoiseError("idle_damping needs t1 > 0")
        elif v == "idle_dephasing":
            if self.t2 is None or self.t2 <= 0:
                raise NoiseError("idle_dephasing needs t2 > 0")
        elif v == "depolarizing":
            _check_unit("eps1", self.eps1)
            _check_unit("eps2", self.eps2)
        elif v == "white_noise":
            _check_unit("f", self.f)
        elif v != "none":
            raise NoiseError(f"unknown noise variant {v!r}")
        if self.idle_schedule not in IDLE_SCHEDULES:
            raise NoiseError(f"idle_schedule must be one of {IDLE_SCHEDULES}")

    @classmethod
    def none(cls) -> "NoiseSpec":
        return cls()

    @classmethod
    def idle_damping(cls, t1: float, **kw) -> "NoiseSpec":
        return cls("idle_damping", t1=t1, **kw)

    @classmethod
    def idle_dephasing(cls, t2: float, **kw) -> "NoiseSpec":
        return cls("idle_dephasing", t2=t2, **kw)

    @classmethod
    def depolarizing(cls, eps1: float, eps2: float, **kw) -> "NoiseSpec":
        return cls("depolarizing", eps1=eps1, eps2=eps2, **kw)

    @classmethod
    def white_noise(cls, f: float) -> "NoiseSpec":
        return cls("white_noise", f=f)

    @property
    def needs_density_matrix(self) -> bool:
        return self.variant in ("idle_damping", "idle_dephasing", "depolarizing")

    def to_dict(self) -> dict:
        """Config form; times in microseconds."""
        d: dict = {"variant": self.variant}
        if self.variant == "idle_damping":
            d["t1_us"] = self.t1 / 1000.0
        elif self.variant == "idle_dephasing":
            d["t2_us"] = self.t2 / 1000.0
        elif self.variant == "depolarizing":
            d.update(eps1=self.eps1, eps2=self.eps2, instant_gate_errors=self.instant_gate_errors)
        elif self.variant == "white_noise":
            d["f"] = self.f
        if self.variant.startswith("idle"):
            d["idle_schedule"] = self.idle_schedule
        return d

    @classmethod
    def from_dict(cls, d: Optional[dict]) -> "NoiseSpec":
        if not d:
            return cls()
        known = {"variant", "t1_us", "t2_us", "eps1", "eps2", "f", "idle_schedule", "instant_gate_errors"}
        extra = set(d) - known
        if extra:
            raise NoiseError(f"unknown noise keys: {sorted(extra)}")
        kw: dict = {"variant": d.get("variant", "none")}
        if "t1_us" in d:
            kw["t1"] = float(d["t1_us"]) * 1000.0
        if "t2_us" in d:
            kw["t2"] = float(d["t2_us"]) * 1000.0
        for key in ("eps1", "eps2", "f"):
            if key in d:
                kw[key] = float(d[key])
        if "idle_schedule" in d:
            kw["idle_schedule"] = d["idle_schedule"]
        if "instant_gate_errors" in d:
            kw["instant_gate_errors"] = bool(d["instant_gate_errors"])
        return cls(**kw)


@dataclass
class NoisyCircuit:
    """A circuit plus channels inserted between its gates.

    Each entry of ``interleaved`` is ``(position, channel, targets)`` where
    ``position`` counts the base gates applied before the channel
    (``0..len(base)``). Entries are kept sorted by position.
    """

    base: Circuit
    interleaved: list = field(default_factory=list)

    def __post_init__(self):
        n = len(self.base)
        for pos, ch, tg in self.interleaved:
            if not 0 <= pos <= n:
                raise NoiseError(f"position {pos} outside 0..{n}")
            if len(tg) != ch.arity:
                raise NoiseError("channel arity does not match its targets")
        self.interleaved.sort(key=lambda e: e[0])

    @property
    def n_qubits(self) -> int:
        return self.base.n_qubits


@lru_cache(maxsize=4096)
def _idle_channel(variant: str, time_constant: float, duration: float) -> KrausChannel:
    p = idle_probability(duration, variant, time_constant)
    return amplitude_damping_channel(p) if variant == "damping" else dephasing_channel(p)


def _idle_params(spec: NoiseSpec):
    if spec.variant == "idle_damping":
        return "damping", spec.t1
    if spec.variant == "idle_dephasing":
        return "dephasing", spec.t2
    raise NoiseError(f"idle scheduling needs an idle_* noise spec, got {spec.variant!r}")


def schedule_idle_noise(c: Circuit, gs: Optional[GateSet], spec: NoiseSpec,
                        merge: bool = False) -> NoisyCircuit:
    """Insert idle damping/dephasing channels derived from gate durations.

    Gates are perfect and act one at a time (``sequential``) or as early as
    their qubits allow (``asap``). With ``sequential``, every qubit not
    touched by a gate of duration ``t > 0`` idles for ``t``. With ``asap``,
    a qubit idles while waiting for a two-qubit partner and from its last
    gate until the circuit ends.

    ``merge=True`` (sequential only) adds up consecutive idle windows of a
    qubit into one channel placed just before the next gate on that qubit.
    This is exact: idle channels on a qubit commute with gates elsewhere and
    compose by adding durations.
    """
    variant, tc = _idle_params(spec)
    gs = gs or c.gate_set
    if gs is not c.gate_set and [k.name for k in gs.kinds] != [k.name for k in c.gate_set.kinds]:
        raise NoiseError("gate set does not match the circuit")
    durations = np.array([k.duration for k in gs.kinds], dtype=float)[c.kind_index].tolist()
    targets = [tuple(t for t in row if t >= 0) for row in c.targets.tolist()]
    n = c.n_qubits
    out = []

    def add(pos, dur, q):
        if dur > 0:
            out.append((pos, _idle_channel(variant, tc, float(dur)), (q,)))

    if spec.idle_schedule == "sequential":
        pending = [0.0] * n
        for i, (dur, tg) in enumerate(zip(durations, targets)):
            if merge:
                for q in tg:
                    add(i, pending[q], q)
                    pending[q] = 0.0
            if dur > 0:
                for q in range(n):
                    if q in tg:
                        continue
                    if merge:
                        pending[q] += dur
                    else:
                        add(i + 1, dur, q)
        if merge:
            for q in range(n):
                add(len(c), pending[q], q)
    else:
        free = [0.0] * n
        for i, (dur, tg) in enumerate(zip(durations, targets)):
            start = max(free[q] for q in tg)
            for q in tg:
                add(i, start - free[q], q)
                free[q] = start + dur
        end = max(free)
        for q in range(n):
            add(len(c), end - free[q], q)
    return NoisyCircuit(c, out)


def circuit_duration(c: Circuit, schedule: str = "asap") -> float:
    """Wall-clock length of a circuit under the given gate schedule."""
    durations = c.durations
    if schedule == "sequential":
        return float(durations.sum())
    free = np.zeros(c.n_qubits)
    for dur, row in zip(durations.tolist(), c.targets.tolist()):
        tg = [t for t in row if t >= 0]
        start = max(free[q] for q in tg)
        for q in tg:
            free[q] = start + dur
    return float(free.max(initial=0.0))


@lru_cache(maxsize=256)
def _depolarizing(arity: int, eps: float) -> KrausChannel:
    return depolarizing_channel_1q(eps) if arity == 1 else depolarizing_channel_2q(eps)


def schedule_gate_errors(c: Circuit, spec: NoiseSpec) -> NoisyCircuit:
    """Follow every gate by a depolarizing channel on its own qubits."""
    if spec.variant != "depolarizing":
        raise NoiseError(f"gate errors need a depolarizing noise spec, got {spec.variant!r}")
    ch = {1: _depolarizing(1, spec.eps1), 2: _depolarizing(2, spec.eps2)}
    durations = c.durations.tolist()
    out = []
    for i, (row, dur) in enumerate(zip(c.targets.tolist(), durations)):
        if dur == 0 and not spec.instant_gate_errors:
            continue
        tg = tuple(t for t in row if t >= 0)
        out.append((i + 1, ch[len(tg)], tg))
    return NoisyCircuit(c, out)


def schedule_noise(c: Circuit, spec: NoiseSpec) -> NoisyCircuit:
    """Dispatch on the spec variant; ``none``/``white_noise`` add no channels."""
    if spec.variant in ("idle_damping", "idle_dephasing"):
        return schedule_idle_noise(c, c.gate_set, spec, merge=True)
    if spec.variant == "depolarizing":
        return schedule_gate_errors(c, spec)
    return NoisyCircuit(c, [])

