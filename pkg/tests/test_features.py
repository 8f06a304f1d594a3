import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cas_srfe.features import (FeatureSet, build_reweighted_system, build_system,
                               eval_expansion, eval_feature, gaussian_frequency_measure,
                               generate_features)


def test_generate_features_scalar_scale(rng):
    gamma = gaussian_frequency_measure(1.0, 1)
    fs = generate_features(gamma, 1000, rng)
    assert fs.frequencies.shape == (1000, 1)
    assert abs(fs.frequencies.std() - 1.0) < 0.1


def test_generate_single_feature(rng):
    fs = generate_features(gaussian_frequency_measure(2.0, 3), 1, rng)
    assert fs.frequencies.shape == (1, 3)


def test_generate_vector_scale_std_ratio(rng):
    gamma = gaussian_frequency_measure([1.0, 1e-3], 2)
    fs = generate_features(gamma, 10**5, rng)
    stds = fs.frequencies.std(axis=0)
    assert stds[0] / stds[1] == pytest.approx(1000, rel=0.05)


def test_generate_deterministic():
    gamma = gaussian_frequency_measure(1.0, 2)
    a = generate_features(gamma, 20, np.random.default_rng(3)).frequencies
    b = generate_features(gamma, 20, np.random.default_rng(3)).frequencies
    np.testing.assert_array_equal(a, b)


def test_eval_feature_trivials(rng):
    assert eval_feature(np.zeros(2), rng.normal(size=2)) == pytest.approx(1.0)
    assert eval_feature(np.array([np.pi]), np.array([1.0])) == pytest.approx(-1.0)
    w, x = rng.normal(size=3), rng.normal(size=3)
    assert abs(eval_feature(w, x)) == pytest.approx(1.0)


def test_build_system_single_entry():
    fs = FeatureSet(np.zeros((1, 1)))
    system = build_system(fs, np.array([[0.7]]), np.array([2.0]))
    assert system.matrix == pytest.approx(np.array([[1.0]]))
    assert system.rhs == pytest.approx(np.array([2.0]))


def test_unit_column_norms(rng):
    fs = generate_features(gaussian_frequency_measure(1.0, 2), 30, rng)
    system = build_system(fs, rng.normal(size=(17, 2)), rng.normal(size=17))
    np.testing.assert_allclose(np.linalg.norm(system.matrix, axis=0), 1.0, rtol=1e-12)


def test_build_system_matches_direct_formula(rng):
    W = rng.normal(size=(2, 1))
    X = rng.normal(size=(3, 1))
    vals = rng.normal(size=3)
    system = build_system(FeatureSet(W), X, vals)
    for s in range(3):
        for r in range(2):
            assert system.matrix[s, r] == pytest.approx(
                np.exp(1j * X[s, 0] * W[r, 0]) / np.sqrt(3))
        assert system.rhs[s] == pytest.approx(vals[s] / np.sqrt(3))


def test_reweight_unit_weight_is_identity(rng):
    fs = generate_features(gaussian_frequency_measure(1.0, 1), 10, rng)
    X = rng.normal(size=(6, 1))
    vals = rng.normal(size=6)
    plain = build_system(fs, X, vals)
    weighted = build_reweighted_system(fs, X, vals, lambda x: 1.0)
    np.testing.assert_allclose(weighted.matrix, plain.matrix)
    np.testing.assert_allclose(weighted.rhs, plain.rhs)


def test_reweight_constant_four_doubles(rng):
    fs = generate_features(gaussian_frequency_measure(1.0, 1), 10, rng)
    X = rng.normal(size=(6, 1))
    vals = rng.normal(size=6)
    plain = build_system(fs, X, vals)
    weighted = build_reweighted_system(fs, X, vals, lambda x: 4.0)
    np.testing.assert_allclose(weighted.matrix, 2 * plain.matrix)
    np.testing.assert_allclose(weighted.rhs, 2 * plain.rhs)


def test_reweight_rejects_bad_weights(rng):
    fs = generate_features(gaussian_frequency_measure(1.0, 1), 5, rng)
    X = rng.normal(size=(4, 1))
    vals = np.ones(4)
    with pytest.raises(ValueError):
        build_reweighted_system(fs, X, vals, lambda x: -1.0)
    with pytest.raises(ValueError):
        build_reweighted_system(fs, X, vals, lambda x: np.inf)


def test_eval_expansion_trivials(rng):
    fs = FeatureSet(np.vstack([np.zeros((1, 1)), rng.normal(size=(4, 1))]))
    assert eval_expansion(fs, np.zeros(5), np.array([0.3])) == 0.0
    c = np.zeros(5, dtype=complex)
    c[0] = 1.0
    for x in rng.normal(size=(5, 1)):
        assert eval_expansion(fs, c, x) == pytest.approx(1.0)


def test_expansion_reproduces_rhs(rng):
    # b built from the complex expansion is reproduced by A @ c_true.
    fs = generate_features(gaussian_frequency_measure(1.0, 1), 8, rng)
    c = rng.normal(size=8) + 1j * rng.normal(size=8)
    X = rng.normal(size=(12, 1))
    phi = np.exp(1j * X @ fs.frequencies.T)
    vals = (phi @ c).real
    system = build_system(fs, X, vals.astype(float))
    lhs = (system.matrix @ c).real
    np.testing.assert_allclose(lhs, system.rhs.real, atol=1e-12)


@given(a=st.floats(-5, 5), seed=st.integers(0, 2**16))
@settings(max_examples=30, deadline=None)
def test_expansion_linearity(a, seed):
    rng = np.random.default_rng(seed)
    fs = generate_features(gaussian_frequency_measure(1.0, 1), 6, rng)
    c1 = rng.normal(size=6) + 1j * rng.normal(size=6)
    c2 = rng.normal(size=6) + 1j * rng.normal(size=6)
    x = rng.normal(size=(1,))

    def complex_eval(c):
        return np.sum(c * np.exp(1j * x[0] * fs.frequencies[:, 0]))

    lhs = complex_eval(a * c1 + c2)
    rhs = a * complex_eval(c1) + complex_eval(c2)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
    assert eval_expansion(fs, a * c1 + c2, x) == pytest.approx(lhs.real, rel=1e-9, abs=1e-9)


def test_end_to_end_fit_matches_training_residual(rng):
    from cas_srfe.sparse_recovery import solve_normalized

    fs = generate_features(gaussian_frequency_measure(1.0, 1), 300, rng)
    X = rng.normal(size=(60, 1))
    vals = np.exp(X[:, 0])
    system = build_system(fs, X, vals)
    sol = solve_normalized(system.matrix, system.rhs, 15, solver="omp")
    preds = eval_expansion(fs, sol.coeffs, X)
    achieved = sol.residual_norm * np.sqrt(60)  # undo the 1/sqrt(m) scaling
    assert np.linalg.norm(vals - preds) <= achieved + 1e-8


def test_shape_mismatch_raises(rng):
    fs = generate_features(gaussian_frequency_measure(1.0, 2), 5, rng)
    with pytest.raises(ValueError):
        build_system(fs, rng.normal(size=(4, 3)), np.ones(4))
    with pytest.raises(ValueError):
        build_system(fs, rng.normal(size=(4, 2)), np.ones(5))
    with pytest.raises(ValueError):
        eval_expansion(fs, np.zeros(4), np.zeros(2))
    with pytest.raises(ValueError):
        eval_feature(np.zeros(2), np.zeros(3))
