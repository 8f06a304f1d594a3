import numpy as np
import pytest

from cas_srfe.christoffel import OrthonormalBasis, build_basis
from cas_srfe.features import FeatureSet, generate_features, gaussian_frequency_measure
from cas_srfe.measures import Measure


def make_basis(rng, n_support=8, dim=1, measure=None, scale=1.0):
    measure = measure or Measure.gaussian(dim)
    fs = generate_features(gaussian_frequency_measure(scale, dim), n_support, rng)
    return build_basis(measure, fs, np.arange(n_support))


def brute_force_christoffel(basis, x, n_directions=10_000):
    """Max of |p(x)|^2 over unit-norm p, gridding the coefficient sphere.

    The phase of each coefficient is optimized analytically (align with
    psi_j(x)), leaving a grid over the nonnegative real sphere of moduli.
    """
    mags = np.abs(np.atleast_2d(basis.basis_values(x)))[0]
    r = basis.r
    if r == 1:
        return float(mags[0] ** 2)
    if r == 2:
        theta = np.linspace(0, np.pi / 2, n_directions)
        a = np.column_stack([np.cos(theta), np.sin(theta)])
    else:
        # Fibonacci sphere folded into the nonnegative octant.
        n = 8 * n_directions
        i = np.arange(n) + 0.5
        phi = np.arccos(1 - 2 * i / n)
        golden = np.pi * (1 + 5**0.5)
        a = np.abs(np.column_stack([np.cos(golden * i) * np.sin(phi),
                                    np.sin(golden * i) * np.sin(phi),
                                    np.cos(phi)]))
    return float(np.max((a @ mags) ** 2))


def test_single_feature_basis(rng):
    basis = make_basis(rng, n_support=1)
    assert basis.r == 1
    assert basis.eigvals[0] == pytest.approx(1.0)
    for x in rng.normal(size=(5, 1)):
        assert basis.christoffel(x) == pytest.approx(1.0)
        psi = basis.basis_values(x)
        assert abs(psi[0]) == pytest.approx(1.0)


def test_duplicate_frequencies_truncate_null_direction():
    measure = Measure.gaussian(1)
    fs = FeatureSet(np.array([[0.4], [0.4]]))
    basis = build_basis(measure, fs, [0, 1])
    assert basis.r == 1
    assert basis.eigvals[0] == pytest.approx(2.0)


def test_trace_preservation(rng):
    measure = Measure.gaussian(1)
    fs = generate_features(gaussian_frequency_measure(1.0, 1), 12, rng)
    support = np.arange(12)
    G = measure.gram_matrix(fs.frequencies[support])
    vals = np.clip(np.linalg.eigvalsh(G), 0, None)
    assert vals.sum() == pytest.approx(12, abs=1e-8 * 12)


def test_monte_carlo_orthonormality(rng):
    basis = make_basis(rng, n_support=8)
    xs = basis.measure.sample(100_000, rng)
    psi = basis.basis_values(xs)
    gram = psi.conj().T @ psi / xs.shape[0]
    target = np.eye(basis.r)
    # 4 standard errors at this sample size; entries of psi_i* psi_j have
    # variance at most a few units for well-separated Gaussian frequencies.
    for i in range(basis.r):
        for j in range(basis.r):
            z = psi[:, i].conj() * psi[:, j]
            se = np.sqrt((z.real.var() + z.imag.var()) / xs.shape[0])
            assert abs(gram[i, j] - target[i, j]) < 4 * se + 1e-6


def test_christoffel_matches_sup_definition(rng):
    for n_support in (1, 2, 3):
        basis = make_basis(rng, n_support=n_support)
        for x in rng.normal(size=(5, 1)):
            k = basis.christoffel(x)
            brute = brute_force_christoffel(basis, x)
            assert brute == pytest.approx(k, rel=2e-4)
            assert brute <= k + 1e-12  # grid max never exceeds the supremum


def test_christoffel_mean_is_r(rng):
    basis = make_basis(rng, n_support=10)
    xs = basis.measure.sample(200_000, rng)
    vals = basis.christoffel(xs) / basis.r
    se = vals.std() / np.sqrt(xs.shape[0])
    assert abs(vals.mean() - 1.0) < 3 * se + 1e-3


def test_christoffel_dominates_each_term(rng):
    basis = make_basis(rng, n_support=6)
    xs = rng.normal(size=(50, 1))
    k = basis.christoffel(xs)
    psi2 = np.abs(basis.basis_values(xs)) ** 2
    assert np.all(k[:, None] >= psi2 - 1e-12)


def test_cs_density_single_feature_equals_h(rng):
    basis = make_basis(rng, n_support=1)
    for x in rng.normal(size=(5, 1)):
        assert basis.cs_density(x) == pytest.approx(basis.measure.density(x))


def test_cs_density_normalized(rng):
    basis = make_basis(rng, n_support=10)
    xs = basis.measure.sample(200_000, rng)
    # Importance sampling under the underlying measure: mean of K/r is the
    # total mass of the sampling density.
    vals = basis.christoffel(xs) / basis.r
    se = vals.std() / np.sqrt(xs.shape[0])
    assert abs(vals.mean() - 1.0) < 3 * se + 1e-3


def test_cs_density_zero_off_support(rng):
    measure = Measure.exponential(1, rate=1.0)
    fs = generate_features(gaussian_frequency_measure(1.0, 1), 5, rng)
    basis = build_basis(measure, fs, np.arange(5))
    assert basis.cs_density(np.array([-1.0])) == 0.0


def test_weight_reciprocal_identity(rng):
    basis = make_basis(rng, n_support=7)
    for x in rng.normal(size=(20, 1)):
        assert basis.weight(x) * basis.christoffel(x) / basis.r == pytest.approx(1.0)


def test_weight_single_feature_is_one(rng):
    basis = make_basis(rng, n_support=1)
    for x in rng.normal(size=(5, 1)):
        assert basis.weight(x) == pytest.approx(1.0)


def test_weight_cap_on_vanishing_christoffel():
    # A basis with an artificially zeroed direction to force K -> 0.
    measure = Measure.gaussian(1)
    basis = OrthonormalBasis(np.array([[1.0]]), np.array([[0.0]]), np.array([1.0]), measure)
    assert basis.weight(np.array([0.0])) == pytest.approx(1e30)


def test_unitary_remix_invariance(rng):
    basis = make_basis(rng, n_support=6)
    r = basis.r
    # Random unitary from a complex QR.
    z = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    q, _ = np.linalg.qr(z)
    mixed = OrthonormalBasis(basis.frequencies,
                             (basis.eigvecs / np.sqrt(basis.eigvals)) @ q,
                             np.ones(r), basis.measure)
    xs = rng.normal(size=(30, 1))
    np.testing.assert_allclose(mixed.christoffel(xs), basis.christoffel(xs), atol=1e-10)


def test_relative_truncation_mode(rng):
    measure = Measure.gaussian(1)
    fs = FeatureSet(np.array([[0.0], [1e-8]]))  # nearly identical features
    absolute = build_basis(measure, fs, [0, 1], trunc_tol=1e-10)
    relative = build_basis(measure, fs, [0, 1], trunc_tol=1e-10, relative=True)
    assert absolute.r in (1, 2)
    assert relative.r <= absolute.r


def test_empty_support_raises(rng):
    fs = generate_features(gaussian_frequency_measure(1.0, 1), 5, rng)
    with pytest.raises(ValueError):
        build_basis(Measure.gaussian(1), fs, [])
    with pytest.raises(ValueError):
        build_basis(Measure.gaussian(1), fs, [0], trunc_tol=0.0)
