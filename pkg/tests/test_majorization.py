import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from majorbench.majorization import (AnalysisError, FluctuationCurve, MajorizationOrder,
                                     bootstrap_curve_se, distance_to_reference,
                                     ensemble_fluctuations, estimate_from_shots, lorenz_cumulants,
                                     majorization_compare, read_curve_csv, rescale_reference,
                                     sample_shots, white_noise_transform, write_curve_csv)

O = MajorizationOrder


def dists(min_n=2, max_n=32):
    return st.integers(min_n, max_n).flatmap(
        lambda n: arrays(float, n, elements=st.floats(0, 1)).filter(lambda a: a.sum() > 1e-3)
    ).map(lambda a: a / a.sum())


class TestCumulants:
    def test_examples(self):
        np.testing.assert_allclose(lorenz_cumulants([1, 0, 0, 0]), [1, 1, 1, 1])
        np.testing.assert_allclose(lorenz_cumulants([0.25] * 4), [0.25, 0.5, 0.75, 1.0])
        np.testing.assert_allclose(lorenz_cumulants([0.1, 0.5, 0.2, 0.2]), [0.5, 0.7, 0.9, 1.0])

    def test_stacked_input(self, rng):
        p = rng.dirichlet(np.ones(8), size=5)
        np.testing.assert_array_equal(lorenz_cumulants(p)[3], lorenz_cumulants(p[3]))

    def test_invariants_on_many_vectors(self, rng):
        for n in range(1, 7):
            p = rng.dirichlet(np.ones(2**n) * rng.choice([0.1, 1.0, 5.0]), size=10_000 // 6)
            f = lorenz_cumulants(p)
            d = np.diff(f, axis=1)
            assert np.all(d >= -1e-15)
            assert np.all(np.abs(f[:, -1] - 1) < 1e-9)
            assert np.all(d[:, 1:] <= d[:, :-1] + 1e-12)
            assert np.all(f[:, 0] >= 1 / 2**n - 1e-12)

    @given(dists(), st.integers(0, 2**32 - 1))
    def test_permutation_invariance(self, p, seed):
        perm = np.random.default_rng(seed).permutation(len(p))
        np.testing.assert_allclose(lorenz_cumulants(p[perm]), lorenz_cumulants(p), atol=1e-15)


class TestFluctuations:
    def test_identical_members(self):
        f = lorenz_cumulants([0.5, 0.3, 0.1, 0.1])
        assert np.all(ensemble_fluctuations([f, f, f]).values == 0)

    def test_two_member_population_std(self):
        a = lorenz_cumulants([1.0, 0, 0, 0])
        b = lorenz_cumulants([0.5, 0.5, 0, 0])
        curve = ensemble_fluctuations([a, b])
        assert curve.values[0] == pytest.approx(0.25)
        assert curve.ensemble_size == 2 and curve.n_qubits == 2

    def test_point_masses_give_zero(self, rng):
        p = np.eye(16)[rng.integers(16, size=50)]
        curve = ensemble_fluctuations(lorenz_cumulants(p))
        assert np.all(curve.values == 0)

    def test_last_entry_zero(self, rng):
        curve = ensemble_fluctuations(lorenz_cumulants(rng.dirichlet(np.ones(32), size=200)))
        assert curve.values[-1] < 1e-12 and np.all(curve.values >= 0)

    def test_errors(self):
        with pytest.raises(AnalysisError):
            ensemble_fluctuations([])
        with pytest.raises(AnalysisError):
            ensemble_fluctuations([np.ones(4) / 4, np.ones(8) / 8])
        with pytest.raises(AnalysisError):
            FluctuationCurve(2, [0.1, -0.1, 0, 0], 3)

    def test_haar2_matches_dirichlet_oracle(self):
        from majorbench.runner import haar_cumulants
        from majorbench.sampler import RngStream
        cum = haar_cumulants(2, 10_000, RngStream(21))
        oracle = lorenz_cumulants(np.random.default_rng(22).dirichlet(np.ones(4), size=10_000))
        gen = np.random.default_rng(23)
        a, b = ensemble_fluctuations(cum), ensemble_fluctuations(oracle)
        se = np.hypot(bootstrap_curve_se(cum, 200, gen), bootstrap_curve_se(oracle, 200, gen))
        assert np.all(np.abs(a.values - b.values) <= 3 * se + 1e-12)


def brute_force_order(p, q, tol=1e-12):
    ps, qs = sorted(p, reverse=True), sorted(q, reverse=True)
    sp = sq = 0.0
    q_ge = p_ge = True
    for a, b in zip(ps, qs):
        sp += a
        sq += b
        q_ge &= sq >= sp - tol
        p_ge &= sp >= sq - tol
    if q_ge and p_ge:
        return O.EQUAL
    return O.Q_MAJORIZES_P if q_ge else O.P_MAJORIZES_Q if p_ge else O.INCOMPARABLE


class TestMajorization:
    def test_examples(self, rng):
        p = rng.dirichlet(np.ones(8))
        assert majorization_compare(np.ones(8) / 8, p) in (O.Q_MAJORIZES_P, O.EQUAL)
        assert majorization_compare(p, np.eye(8)[0]) in (O.Q_MAJORIZES_P, O.EQUAL)
        assert majorization_compare([0.6, 0.25, 0.15], [0.5, 0.4, 0.1]) is O.INCOMPARABLE
        assert majorization_compare([0.2, 0.8], [0.8, 0.2]) is O.EQUAL

    def test_length_mismatch(self):
        with pytest.raises(AnalysisError):
            majorization_compare([0.5, 0.5], [1.0, 0, 0])

    def test_against_brute_force(self, rng):
        seen = set()
        for i in range(10_000):
            n = int(rng.integers(2, 7))
            alpha = rng.choice([0.2, 1.0, 4.0])
            p = rng.dirichlet(np.full(n, alpha))
            q = rng.dirichlet(np.full(n, alpha)) if i % 5 else rng.permutation(p)
            got = majorization_compare(p, q)
            assert got is brute_force_order(p, q)
            assert majorization_compare(q, p) is got.mirrored()
            seen.add(got)
        assert seen == set(O)

    @given(dists(2, 16), st.integers(0, 2**32 - 1))
    def test_consistent_with_cumulants(self, p, seed):
        q = np.random.default_rng(seed).dirichlet(np.ones(len(p)))
        fp, fq = lorenz_cumulants(p), lorenz_cumulants(q)
        got = majorization_compare(p, q)
        assert (got in (O.Q_MAJORIZES_P, O.EQUAL)) == bool(np.all(fq >= fp - 1e-12))


class TestDistance:
    def test_examples(self):
        a = FluctuationCurve(2, [0.1, 0.2, 0.1, 0.0], 10)
        b = FluctuationCurve(2, [0.2, 0.3, 0.2, 0.1], 10)
        assert distance_to_reference(a, a) == 0
        assert distance_to_reference(a, b) == pytest.approx(0.2)
        assert distance_to_reference(b, a) == distance_to_reference(a, b)
        with pytest.raises(AnalysisError):
            distance_to_reference(a, FluctuationCurve(1, [0.1, 0.0], 2))


class TestWhiteNoise:
    def test_examples(self, rng):
        p = rng.dirichlet(np.ones(4))
        np.testing.assert_allclose(white_noise_transform(p, 1.0), p)
        np.testing.assert_allclose(white_noise_transform(p, 0.0), [0.25] * 4)
        np.testing.assert_allclose(white_noise_transform([1.0, 0.0], 0.5), [0.75, 0.25])
        with pytest.raises(AnalysisError):
            white_noise_transform(p, 1.2)

    def test_rescale_examples(self):
        c = FluctuationCurve(1, [0.3, 0.0], 5)
        np.testing.assert_array_equal(rescale_reference(c, 1.0).values, c.values)
        np.testing.assert_array_equal(rescale_reference(c, 0.0).values, [0, 0])
        with pytest.raises(AnalysisError):
            rescale_reference(c, -0.1)

    @given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.integers(1, 6))
    def test_transform_then_analyze_equals_rescale(self, seed, f, n):
        p = np.random.default_rng(seed).dirichlet(np.ones(2**n), size=50)
        direct = ensemble_fluctuations(lorenz_cumulants(white_noise_transform(p, f)))
        rescaled = rescale_reference(ensemble_fluctuations(lorenz_cumulants(p)), f)
        assert np.max(np.abs(direct.values - rescaled.values)) < 1e-12


class TestShots:
    def test_examples(self):
        np.testing.assert_array_equal(estimate_from_shots([0] * 7, 2), [1, 0, 0, 0])
        np.testing.assert_array_equal(estimate_from_shots([0, 1, 1, 3], 2), [0.25, 0.5, 0, 0.25])
        with pytest.raises(AnalysisError):
            estimate_from_shots([], 2)
        with pytest.raises(AnalysisError):
            estimate_from_shots([4], 2)

    def test_concentration(self, rng):
        p = rng.dirichlet(np.ones(16))
        shots = 10**6
        est = estimate_from_shots(rng.choice(16, size=shots, p=p), 4)
        assert np.max(np.abs(est - p)) < 5 / np.sqrt(shots)
        est2 = sample_shots(p, shots, rng)
        assert np.max(np.abs(est2 - p)) < 5 / np.sqrt(shots)


def test_csv_round_trip(tmp_path, rng):
    curve = ensemble_fluctuations(lorenz_cumulants(rng.dirichlet(np.ones(8), size=30)))
    path = tmp_path / "c.csv"
    write_curve_csv(path, curve)
    assert path.read_text().splitlines()[0] == "k,k_over_N,std_F"
    back = read_curve_csv(path, 30)
    np.testing.assert_array_equal(back.values, curve.values)
    assert back.n_qubits == 3
    (tmp_path / "bad.csv").write_text("a,b\n1,2\n")
    with pytest.raises(AnalysisError):
        read_curve_csv(tmp_path / "bad.csv")
