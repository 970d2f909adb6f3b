"""Native gate vocabularies: kinds, concrete gate operations and matrices.

Matrix convention for two-qubit gates: ``targets[0]`` is the most significant
bit of the local 4x4 basis, so ``CNOT`` on ``(c, t)`` uses ``c`` as control.
Durations are in nanoseconds.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

TWO_PI = 2.0 * np.pi

AngleDomain = Union[None, str, tuple]

_SQRT_X = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
_FIXED = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "sx": _SQRT_X,
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "s": np.diag([1, 1j]),
    "cnot": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
}


def _rz(theta: np.ndarray) -> np.ndarray:
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(-0.5j * theta)
    out[..., 1, 1] = np.exp(0.5j * theta)
    return out


def _rx(theta: np.ndarray) -> np.ndarray:
    c = np.cos(0.5 * theta)
    s = -1j * np.sin(0.5 * theta)
    out = np.empty(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


_PARAMETRIC = {"rz": _rz, "rx": _rx}

GENERATORS = tuple(sorted(set(_FIXED) | set(_PARAMETRIC)))


class GateError(ValueError):
    """Invalid gate kind, gate operation or gate set."""


def _is_unitary(m: np.ndarray, atol: float) -> bool:
    return np.allclose(m.conj().T @ m, np.eye(m.shape[0]), atol=atol, rtol=0)


@dataclass(frozen=True, eq=False)
class GateKind:
    """One entry of a native gate vocabulary.

    Args:
        name: identifier, unique within its gate set.
        arity: number of qubits (1 or 2).
        generator: name of a built-in matrix family (see ``GENERATORS``).
            Ignored when ``matrix`` is given.
        angle_domain: ``None`` for fixed gates, ``"continuous"`` for angles
            drawn from ``[0, 2pi)``, or a tuple of allowed angles.
        duration: gate time in ns.
        matrix: explicit unitary for custom fixed gates.
    """

    name: str
    arity: int
    generator: Optional[str] = None
    angle_domain: AngleDomain = None
    duration: float = 0.0
    matrix: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise GateError(f"{self.name}: arity must be 1 or 2, got {self.arity}")
        if self.duration < 0:
            raise GateError(f"{self.name}: negative duration")
        dom = self.angle_domain
        if isinstance(dom, (list, np.ndarray)):
            dom = tuple(float(a) for a in dom)
            object.__setattr__(self, "angle_domain", dom)
        if isinstance(dom, tuple) and len(dom) == 0:
            raise GateError(f"{self.name}: discrete angle set is empty")
        if isinstance(dom, str) and dom != "continuous":
            raise GateError(f"{self.name}: unknown angle domain {dom!r}")
        d = 2**self.arity
        if self.matrix is not None:
            m = np.asarray(self.matrix, dtype=complex)
            if m.shape != (d, d):
                raise GateError(f"{self.name}: matrix must be {d}x{d}")
            if not _is_unitary(m, 1e-10):
                raise GateError(f"{self.name}: matrix is not unitary")
            if dom is not None:
                raise GateError(f"{self.name}: explicit matrices take no angle")
            m.setflags(write=False)
            object.__setattr__(self, "matrix", m)
            return
        gen = self.generator
        if gen in _FIXED:
            if _FIXED[gen].shape != (d, d):
                raise GateError(f"{self.name}: generator {gen!r} has wrong arity")
            if dom is not None:
                raise GateError(f"{self.name}: generator {gen!r} takes no angle")
        elif gen in _PARAMETRIC:
            if self.arity != 1:
                raise GateError(f"{self.name}: generator {gen!r} is single-qubit")
            if dom is None:
                raise GateError(f"{self.name}: generator {gen!r} needs an angle domain")
        else:
            raise GateError(f"{self.name}: unknown generator {gen!r}")

    @property
    def parametric(self) -> bool:
        return self.angle_domain is not None

    def check_angle(self, angle: Optional[float]) -> None:
        dom = self.angle_domain
        if dom is None:
            if angle is not None:
                raise GateError(f"{self.name} takes no angle")
            return
        if angle is None:
            raise GateError(f"{self.name} requires an angle")
        if dom == "continuous":
            if not 0.0 <= angle < TWO_PI:
                raise GateError(f"{self.name}: angle {angle} outside [0, 2pi)")
        elif not np.any(np.isclose(angle, dom, rtol=0, atol=1e-12)):
            raise GateError(f"{self.name}: angle {angle} not in {dom}")

    def matrices(self, angles: np.ndarray) -> np.ndarray:
        """Stack of matrices for an array of angles (ignored for fixed kinds)."""
        angles = np.asarray(angles, dtype=float)
        if self.matrix is not None:
            base = self.matrix
        elif self.generator in _FIXED:
            base = _FIXED[self.generator]
        else:
            return _PARAMETRIC[self.generator](angles)
        return np.broadcast_to(base, angles.shape + base.shape)

    def unitary(self, angle: Optional[float] = None) -> np.ndarray:
        self.check_angle(angle)
        return np.array(self.matrices(np.float64(0.0 if angle is None else angle)))

    def __repr__(self):
        return f"GateKind({self.name!r}, arity={self.arity}, duration={self.duration})"


@dataclass(frozen=True)
class GateSet:
    name: str
    kinds: tuple

    def __post_init__(self):
        kinds = tuple(self.kinds)
        object.__setattr__(self, "kinds", kinds)
        names = [k.name for k in kinds]
        if len(set(names)) != len(names):
            raise GateError(f"gate set {self.name!r}: duplicate kind names")

    def __getitem__(self, name: str) -> GateKind:
        for k in self.kinds:
            if k.name == name:
                return k
        raise KeyError(name)

    def __len__(self):
        return len(self.kinds)

    def index(self, name: str) -> int:
        return [k.name for k in self.kinds].index(name)

    @property
    def max_arity(self) -> int:
        return max((k.arity for k in self.kinds), default=0)


@dataclass(frozen=True)
class GateOp:
    kind: GateKind
    targets: tuple
    angle: Optional[float] = None

    def __post_init__(self):
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if len(targets) != self.kind.arity:
            raise GateError(f"{self.kind.name} acts on {self.kind.arity} qubit(s), got {targets}")
        if len(set(targets)) != len(targets):
            raise GateError(f"repeated target in {targets}")
        if any(t < 0 for t in targets):
            raise GateError(f"negative target in {targets}")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))
        self.kind.check_angle(self.angle)


def gate_matrix(op: GateOp) -> np.ndarray:
    """Unitary of a gate operation in its local basis."""
    return op.kind.unitary(op.angle)


RX_ANGLES = (np.pi / 2, -np.pi / 2, np.pi, -np.pi)


def _builtin(name: str) -> GateSet:
    if name == "ibm":
        return GateSet("ibm", (
            GateKind("sx", 1, "sx", duration=36.0),
            GateKind("rz", 1, "rz", "continuous", duration=0.0),
            GateKind("cnot", 2, "cnot", duration=400.0),
        ))
    if name == "rigetti":
        return GateSet("rigetti", (
            GateKind("rx", 1, "rx", RX_ANGLES, duration=50.0),
            GateKind("rz", 1, "rz", "continuous", duration=0.0),
            GateKind("cz", 2, "cz", duration=150.0),
        ))
    if name == "clifford":
        return GateSet("clifford", (
            GateKind("h", 1, "h"),
            GateKind("s", 1, "s"),
            GateKind("cnot", 2, "cnot"),
        ))
    raise GateError(f"unknown gate set {name!r}")


_BUILTIN_CACHE: dict = {}


def builtin_gate_set(name: str) -> GateSet:
    """One of ``ibm``, ``rigetti`` or ``clifford``."""
    if name not in _BUILTIN_CACHE:
        _BUILTIN_CACHE[name] = _builtin(name)
    return _BUILTIN_CACHE[name]


def _parse_matrix(rows: Sequence) -> np.ndarray:
    def entry(x):
        if isinstance(x, (list, tuple)):
            return complex(x[0], x[1])
        if isinstance(x, str):
            return complex(x.replace(" ", ""))
        return complex(x)

    return np.array([[entry(x) for x in row] for row in rows], dtype=complex)


def gate_kind_from_dict(d: dict) -> GateKind:
    """Build a kind from a config mapping.

    Keys: ``name``, ``arity``, ``duration`` (ns), and either ``generator`` (+
    ``angles``: ``"continuous"`` or a list) or ``matrix`` (rows of entries,
    each a number, a ``"a+bj"`` string or a ``[re, im]`` pair).
    """
    known = {"name", "arity", "duration", "generator", "angles", "matrix"}
    extra = set(d) - known
    if extra:
        raise GateError(f"unknown gate kind keys: {sorted(extra)}")
    matrix = _parse_matrix(d["matrix"]) if "matrix" in d else None
    return GateKind(
        name=str(d["name"]),
        arity=int(d.get("arity", 1 if matrix is None else int(np.log2(len(matrix))))),
        generator=d.get("generator"),
        angle_domain=d.get("angles"),
        duration=float(d.get("duration", 0.0)),
        matrix=matrix,
    )


def gate_set_from_config(spec: Union[str, dict]) -> GateSet:
    """Builtin name, or ``{"name": ..., "kinds": [...]}`` for a custom set."""
    if isinstance(spec, str):
        return builtin_gate_set(spec)
    kinds: list = [gate_kind_from_dict(k) for k in spec["kinds"]]
    return GateSet(str(spec.get("name", "custom")), tuple(kinds))


def gate_set_to_config(gs: GateSet) -> Union[str, dict]:
    if gs.name in ("ibm", "rigetti", "clifford") and gs is builtin_gate_set(gs.name):
        return gs.name
    kinds = []
    for k in gs.kinds:
        d: dict = {"name": k.name, "arity": k.arity, "duration": k.duration}
        if k.matrix is not None:
            d["matrix"] = [[[float(z.real), float(z.imag)] for z in row] for row in k.matrix]
        else:
            d["generator"] = k.generator
            if k.angle_domain is not None:
                d["angles"] = k.angle_domain if isinstance(k.angle_domain, str) else list(k.angle_domain)
        kinds.append(d)
    return {"name": gs.name, "kinds": kinds}

