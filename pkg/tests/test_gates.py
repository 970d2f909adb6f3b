import itertools

import numpy as np
import pytest

from majorbench import core
from majorbench.core import PureState
from majorbench.gates import (RX_ANGLES, GateError, GateKind, GateOp, GateSet, builtin_gate_set,
                              gate_kind_from_dict, gate_matrix, gate_set_from_config, gate_set_to_config)
from majorbench.noise import PAULIS

IBM = builtin_gate_set("ibm")
RIG = builtin_gate_set("rigetti")
CLIF = builtin_gate_set("clifford")


def test_sqrt_x_squared_is_x():
    sx = gate_matrix(GateOp(IBM["sx"], (0,)))
    psi = core.apply_unitary(core.apply_unitary(PureState.zero(1), sx, [0]), sx, [0])
    np.testing.assert_allclose(core.probabilities(psi), [0, 1], atol=1e-12)
    np.testing.assert_allclose(sx @ sx, [[0, 1], [1, 0]], atol=1e-12)


def test_rz_zero_is_identity():
    np.testing.assert_allclose(gate_matrix(GateOp(IBM["rz"], (0,), 0.0)), np.eye(2), atol=1e-15)


def test_cz_phase_flip():
    psi = PureState(2, np.array([0, 0, 0, 1.0]))
    out = core.apply_unitary(psi, gate_matrix(GateOp(RIG["cz"], (0, 1))), [0, 1])
    np.testing.assert_allclose(out.amplitudes, [0, 0, 0, -1])
    np.testing.assert_allclose(core.probabilities(out), [0, 0, 0, 1])


def test_rx_and_rz_formulas():
    theta = 0.7
    rz = IBM["rz"].unitary(theta)
    np.testing.assert_allclose(rz, np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)]))
    x = np.array([[0, 1], [1, 0]])
    # exp(-i theta X / 2) through the eigen-decomposition of X
    w, v = np.linalg.eigh(x)
    expected = v @ np.diag(np.exp(-0.5j * np.pi * w)) @ v.conj().T
    np.testing.assert_allclose(RIG["rx"].unitary(np.pi), expected, atol=1e-12)


def test_all_matrices_unitary():
    for gs in (IBM, RIG, CLIF):
        for k in gs.kinds:
            angles = [None]
            if k.angle_domain == "continuous":
                angles = list(np.linspace(0, 2 * np.pi, 17, endpoint=False))
            elif k.angle_domain is not None:
                angles = list(k.angle_domain)
            for a in angles:
                m = k.unitary(a)
                assert np.max(np.abs(m.conj().T @ m - np.eye(len(m)))) < 1e-12


def test_builtin_sets():
    assert [k.name for k in IBM.kinds] == ["sx", "rz", "cnot"]
    assert sum(k.arity == 2 for k in IBM.kinds) == 1
    assert IBM["sx"].duration == 36 and IBM["cnot"].duration == 400 and IBM["rz"].duration == 0
    assert RIG["rx"].angle_domain == (np.pi / 2, -np.pi / 2, np.pi, -np.pi)
    assert RIG["rx"].duration == 50 and RIG["cz"].duration == 150 and RIG["rz"].duration == 0
    assert sorted(k.name for k in CLIF.kinds) == ["cnot", "h", "s"]
    with pytest.raises(GateError):
        builtin_gate_set("google")


def _pauli_group(arity):
    if arity == 1:
        return [np.asarray(p) for p in PAULIS]
    return [np.kron(a, b) for a, b in itertools.product(PAULIS, PAULIS)]


def _is_scaled_pauli(m, group):
    for p in group:
        c = np.vdot(p, m) / len(m)
        if abs(abs(c) - 1) < 1e-12 and np.allclose(m, c * p, atol=1e-12):
            return True
    return False


@pytest.mark.parametrize("name", ["h", "s", "cnot"])
def test_clifford_kinds_normalize_pauli_group(name):
    k = CLIF[name]
    u = k.unitary()
    group = _pauli_group(k.arity)
    for p in group:
        assert _is_scaled_pauli(u @ p @ u.conj().T, group)


def test_sqrt_x_is_not_pauli_normalizer_trivially():
    # sanity check of the helper: a generic rotation is not Clifford
    u = IBM["rz"].unitary(0.3)
    assert not _is_scaled_pauli(u @ PAULIS[1] @ u.conj().T, _pauli_group(1))


class TestValidation:
    def test_bad_kinds(self):
        with pytest.raises(GateError):
            GateKind("bad", 3, "x")
        with pytest.raises(GateError):
            GateKind("empty", 1, "rx", ())
        with pytest.raises(GateError):
            GateKind("neg", 1, "x", duration=-1)
        with pytest.raises(GateError):
            GateKind("nope", 1, "foo")
        with pytest.raises(GateError):
            GateKind("arity", 2, "h")
        with pytest.raises(GateError):
            GateKind("u", 1, matrix=np.diag([1, 2]))

    def test_duplicate_names(self):
        with pytest.raises(GateError):
            GateSet("dup", (IBM["sx"], IBM["sx"]))

    def test_ops(self):
        with pytest.raises(GateError):
            GateOp(IBM["rz"], (0,))
        with pytest.raises(GateError):
            GateOp(IBM["sx"], (0,), 0.1)
        with pytest.raises(GateError):
            GateOp(IBM["rz"], (0,), 7.0)
        with pytest.raises(GateError):
            GateOp(RIG["rx"], (0,), 0.3)
        with pytest.raises(GateError):
            GateOp(IBM["cnot"], (1, 1))
        with pytest.raises(GateError):
            GateOp(IBM["cnot"], (1,))
        op = GateOp(RIG["rx"], (2,), -np.pi / 2)
        assert op.angle == -np.pi / 2 and op.targets == (2,)

    def test_rx_angles_constant(self):
        assert RX_ANGLES == RIG["rx"].angle_domain


class TestConfig:
    def test_builtin_round_trip(self):
        assert gate_set_from_config("ibm") is IBM
        assert gate_set_to_config(IBM) == "ibm"

    def test_custom_set(self):
        spec = {"name": "mine", "kinds": [
            {"name": "t", "arity": 1, "duration": 20, "matrix": [[1, 0], [0, "0.7071067811865476+0.7071067811865476j"]]},
            {"name": "ry", "generator": "rx", "angles": [0.5, 1.0], "duration": 30},
            {"name": "iswapish", "arity": 2, "generator": "cz", "duration": 100},
        ]}
        gs = gate_set_from_config(spec)
        assert gs["t"].unitary()[1, 1] == pytest.approx(np.exp(0.25j * np.pi))
        assert gs["ry"].angle_domain == (0.5, 1.0)
        again = gate_set_from_config(gate_set_to_config(gs))
        for a, b in zip(gs.kinds, again.kinds):
            assert a.name == b.name and a.duration == b.duration and a.angle_domain == b.angle_domain
            angle = None if a.angle_domain is None else a.angle_domain[0]
            np.testing.assert_allclose(a.unitary(angle), b.unitary(angle))

    def test_pair_entries_and_unknown_keys(self):
        k = gate_kind_from_dict({"name": "y", "matrix": [[0, [0, -1]], [[0, 1], 0]]})
        np.testing.assert_allclose(k.unitary(), [[0, -1j], [1j, 0]])
        with pytest.raises(GateError):
            gate_kind_from_dict({"name": "y", "generator": "x", "colour": "red"})
