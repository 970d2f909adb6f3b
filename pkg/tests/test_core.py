import numpy as np
import pytest
from hypothesis import given, strategies as st

from majorbench import core
from majorbench.core import MixedState, PureState, StateError
from majorbench.gates import builtin_gate_set
from majorbench.noise import amplitude_damping_channel, dephasing_channel, identity_channel

from conftest import dense_operator

H = builtin_gate_set("clifford")["h"].unitary()
CNOT = builtin_gate_set("clifford")["cnot"].unitary()
X = np.array([[0, 1], [1, 0]], dtype=complex)


def random_unitary(d, gen):
    z = gen.standard_normal((d, d)) + 1j * gen.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_state(n, gen):
    z = gen.standard_normal(2**n) + 1j * gen.standard_normal(2**n)
    return PureState(n, z / np.linalg.norm(z))


def plus():
    return PureState(1, np.array([1, 1]) / np.sqrt(2))


class TestStates:
    def test_norm_checked(self):
        with pytest.raises(StateError):
            PureState(1, np.array([1.0, 1.0]))

    def test_length_checked(self):
        with pytest.raises(StateError):
            PureState(2, np.array([1.0, 0.0]))

    def test_nonfinite_rejected(self):
        with pytest.raises(StateError):
            PureState(1, np.array([np.nan, 0.0]))

    def test_mixed_trace_and_hermitian(self):
        with pytest.raises(StateError):
            MixedState(1, np.diag([0.6, 0.6]))
        with pytest.raises(StateError):
            MixedState(1, np.array([[0.5, 0.1], [0.2, 0.5]]))

    def test_check_psd(self):
        MixedState.maximally_mixed(2).check_psd()
        bad = MixedState(1, np.array([[0.5, 0.9], [0.9, 0.5]]))
        with pytest.raises(StateError):
            bad.check_psd()


class TestApplyUnitary:
    def test_hadamard_on_zero(self):
        out = core.apply_unitary(PureState.zero(1), H, [0])
        np.testing.assert_allclose(core.probabilities(out), [0.5, 0.5], atol=1e-12)

    def test_rz_keeps_basis_state(self):
        rz = builtin_gate_set("ibm")["rz"]
        for theta in (0.0, 1.0, 4.0):
            out = core.apply_unitary(PureState.zero(1), rz.unitary(theta), [0])
            np.testing.assert_allclose(core.probabilities(out), [1, 0], atol=1e-12)

    def test_bell_state(self):
        # (|00> + |10>)/sqrt2 in ket notation |q1 q0>: qubit 0 in |+>, control is qubit 0
        psi = PureState(2, np.array([1, 1, 0, 0]) / np.sqrt(2))
        out = core.apply_unitary(psi, CNOT, [0, 1])
        np.testing.assert_allclose(out.amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-12)

    def test_qubit_zero_is_least_significant(self):
        out = core.apply_unitary(PureState.zero(3), X, [0])
        assert np.argmax(np.abs(out.amplitudes)) == 1
        out = core.apply_unitary(PureState.zero(3), X, [2])
        assert np.argmax(np.abs(out.amplitudes)) == 4

    def test_errors(self):
        with pytest.raises(StateError):
            core.apply_unitary(PureState.zero(2), X, [2])
        with pytest.raises(StateError):
            core.apply_unitary(PureState.zero(2), CNOT, [1, 1])
        with pytest.raises(StateError):
            core.apply_unitary(PureState.zero(2), np.diag([1.0, 2.0]), [0])
        with pytest.raises(StateError):
            core.apply_unitary(PureState.zero(2), CNOT, [0])

    @given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.integers(1, 3))
    def test_matches_dense_embedding(self, seed, n, k):
        gen = np.random.default_rng(seed)
        k = min(k, n)
        targets = [int(t) for t in gen.permutation(n)[:k]]
        u = random_unitary(2**k, gen)
        psi = random_state(n, gen)
        out = core.apply_unitary(psi, u, targets)
        expected = dense_operator(u, targets, n) @ psi.amplitudes
        np.testing.assert_allclose(out.amplitudes, expected, atol=1e-12)
        assert abs(np.linalg.norm(out.amplitudes) - 1) < 1e-10


class TestMixed:
    def test_x_flips_projector(self):
        out = core.apply_unitary_mixed(MixedState.zero(1), X, [0])
        np.testing.assert_allclose(out.matrix, np.diag([0, 1]), atol=1e-12)

    def test_maximally_mixed_invariant(self, rng):
        rho = MixedState.maximally_mixed(3)
        out = core.apply_unitary_mixed(rho, random_unitary(4, rng), [2, 0])
        np.testing.assert_allclose(out.matrix, np.eye(8) / 8, atol=1e-12)

    def test_hadamard_coherences(self):
        out = core.apply_unitary_mixed(MixedState.zero(1), H, [0])
        np.testing.assert_allclose(out.matrix, np.full((2, 2), 0.5), atol=1e-12)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 4))
    def test_matches_dense_conjugation(self, seed, n):
        gen = np.random.default_rng(seed)
        k = min(2, n)
        targets = [int(t) for t in gen.permutation(n)[:k]]
        u = random_unitary(2**k, gen)
        psi = random_state(n, gen)
        rho = core.to_density(psi)
        out = core.apply_unitary_mixed(rho, u, targets)
        full = dense_operator(u, targets, n)
        np.testing.assert_allclose(out.matrix, full @ rho.matrix @ full.conj().T, atol=1e-12)


class TestKraus:
    def test_identity_channel(self, rng):
        rho = core.to_density(random_state(2, rng))
        out = core.apply_kraus(rho, identity_channel(), [1])
        np.testing.assert_allclose(out.matrix, rho.matrix, atol=1e-14)

    def test_full_damping_resets(self):
        one = MixedState(1, np.diag([0.0, 1.0]))
        out = core.apply_kraus(one, amplitude_damping_channel(1.0), [0])
        np.testing.assert_allclose(out.matrix, np.diag([1, 0]), atol=1e-14)

    def test_dephasing_half_on_plus(self):
        rho = core.to_density(plus())
        out = core.apply_kraus(rho, dephasing_channel(0.5), [0])
        # oracle: (rho + Z rho Z) / 2 by hand
        z = np.diag([1, -1])
        np.testing.assert_allclose(out.matrix, 0.5 * (rho.matrix + z @ rho.matrix @ z), atol=1e-14)
        np.testing.assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-14)

    def test_matches_dense_kraus_sum(self, rng):
        n = 3
        rho = core.to_density(random_state(n, rng))
        ch = amplitude_damping_channel(0.3)
        out = core.apply_kraus(rho, ch, [1])
        expected = sum(dense_operator(k, [1], n) @ rho.matrix @ dense_operator(k, [1], n).conj().T
                       for k in ch.operators)
        np.testing.assert_allclose(out.matrix, expected, atol=1e-14)

    def test_arity_mismatch(self):
        with pytest.raises(StateError):
            core.apply_kraus(MixedState.zero(2), identity_channel(), [0, 1])
        with pytest.raises(StateError):
            core.apply_kraus(MixedState.zero(2), identity_channel(), [5])


class TestObservables:
    def test_probabilities_examples(self):
        np.testing.assert_allclose(core.probabilities(PureState.zero(2)), [1, 0, 0, 0])
        np.testing.assert_allclose(core.probabilities(MixedState.maximally_mixed(2)), [0.25] * 4)
        bell = PureState(2, np.array([1, 0, 0, 1]) / np.sqrt(2))
        np.testing.assert_allclose(core.probabilities(bell), [0.5, 0, 0, 0.5], atol=1e-15)

    def test_clean_probabilities(self):
        p = core.clean_probabilities(np.array([0.5, 0.5 + 1e-11, -1e-13, 0.0]))
        assert p.min() >= 0 and abs(p.sum() - 1) < 1e-15
        with pytest.raises(StateError):
            core.clean_probabilities(np.array([0.5, 0.6]))
        with pytest.raises(StateError):
            core.clean_probabilities(np.array([1.1, -0.1]))

    def test_purity_examples(self, rng):
        assert core.purity(core.to_density(random_state(3, rng))) == pytest.approx(1.0, abs=1e-12)
        assert core.purity(MixedState.maximally_mixed(1)) == pytest.approx(0.5)
        assert core.purity(MixedState(1, np.diag([0.75, 0.25]))) == pytest.approx(0.625)

    def test_fidelity_examples(self, rng):
        psi = random_state(2, rng)
        assert core.fidelity(psi, core.to_density(psi)) == pytest.approx(1.0, abs=1e-12)
        zero = PureState.zero(1)
        assert core.fidelity(zero, MixedState.maximally_mixed(1)) == pytest.approx(0.5)
        assert core.fidelity(zero, MixedState(1, np.diag([0.0, 1.0]))) == pytest.approx(0.0)
        with pytest.raises(StateError):
            core.fidelity(zero, MixedState.zero(2))

    @given(st.integers(0, 2**32 - 1), st.integers(1, 4))
    def test_fidelity_with_pure_rho_is_overlap(self, seed, n):
        gen = np.random.default_rng(seed)
        a, b = random_state(n, gen), random_state(n, gen)
        overlap = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
        assert core.fidelity(a, core.to_density(b)) == pytest.approx(overlap, abs=1e-10)

    def test_to_density_examples(self):
        np.testing.assert_allclose(core.to_density(PureState.zero(1)).matrix, np.diag([1, 0]))
        np.testing.assert_allclose(core.to_density(plus()).matrix, np.full((2, 2), 0.5), atol=1e-15)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 5))
    def test_density_round_trip(self, seed, n):
        psi = random_state(n, np.random.default_rng(seed))
        rho = core.to_density(psi)
        assert core.purity(rho) == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(core.probabilities(rho), core.probabilities(psi), atol=1e-12)

    @given(st.integers(0, 2**32 - 1))
    def test_purity_bounds_after_channels(self, seed):
        gen = np.random.default_rng(seed)
        n = 3
        rho = core.to_density(random_state(n, gen))
        for _ in range(10):
            q = int(gen.integers(n))
            if gen.random() < 0.5:
                rho = core.apply_kraus(rho, amplitude_damping_channel(gen.random()), [q])
            else:
                rho = core.apply_kraus(rho, dephasing_channel(0.5 * gen.random()), [q])
            rho = core.apply_unitary_mixed(rho, random_unitary(2, gen), [int(gen.integers(n))])
        assert 1 / 2**n - 1e-9 <= core.purity(rho) <= 1 + 1e-9
        assert abs(np.trace(rho.matrix) - 1) < 1e-9
        rho.check_psd()
