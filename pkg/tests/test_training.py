import numpy as np
import pytest

from qreservoir.basis import blockaded_ring, full_basis
from qreservoir.states import all_ground, basis_state, product_state, random_pure_state
from qreservoir.training import (
    Dataset,
    ReadoutMap,
    extract_features,
    fit_readout,
    gaussian_perturb,
    make_feature_vector,
    nelder_mead,
    pearson_r_squared,
    square_loss,
    train_test_split,
)


def test_feature_vector_bias():
    f = make_feature_vector([0.2, -0.3])
    assert f[-1] == 1.0
    assert f.shape == (3,)


def test_extract_features_all_ground_z():
    st = all_ground(full_basis(3))
    f = extract_features(st, [0, 1, 2], "z")
    assert np.allclose(f, [-1, -1, -1, 1])


def test_extract_features_populations_on_neel():
    b = blockaded_ring(8)
    af = basis_state(b, b.neel_state(offset=1))   # g on site 0
    afp = basis_state(b, b.neel_state(offset=0))  # r on site 0
    assert np.allclose(extract_features(af, [0], "population"), [1, 0, 1])
    assert np.allclose(extract_features(afp, [0], "population"), [0, 1, 1])


def test_extract_features_matches_dense_trace_oracle(rng):
    b = full_basis(2)
    st = random_pure_state(b, rng)
    rho = st.density_matrix()
    sy = np.kron(np.array([[0, 1j], [-1j, 0]]), np.eye(2))
    oracle = float(np.trace(sy @ rho).real)
    f = extract_features(st, [0], "y")
    assert f[0] == pytest.approx(oracle, abs=1e-10)


def test_extract_features_ignores_hidden_sites(rng):
    # perturbing the phase of a hidden site of a product state must not move
    # the features of the listed sites
    a = np.array([1.0, 1.0]) / np.sqrt(2)
    hid0 = np.array([1.0, 1.0]) / np.sqrt(2)
    hid1 = np.array([1.0, np.exp(1.37j)]) / np.sqrt(2)
    f0 = extract_features(product_state([a, hid0]), [0], "y")
    f1 = extract_features(product_state([a, hid1]), [0], "y")
    assert np.abs(f0 - f1).max() < 1e-12


def test_fit_readout_realizable_case(rng):
    x = np.column_stack([rng.normal(size=30), np.ones(30)])
    w_true = np.array([[2.0, -1.0]])
    y = x @ w_true.T
    w = fit_readout(Dataset(x, y), ridge=1e-12)
    loss = square_loss(w.predict(x), y)
    assert loss < 1e-12


def test_fit_readout_bias_only_returns_mean(rng):
    x = np.ones((40, 1))
    y = rng.normal(size=(40, 2))
    w = fit_readout(Dataset(x, y), ridge=0.0)
    assert np.allclose(w.weights[:, 0], y.mean(axis=0), atol=1e-10)


def test_fit_readout_matches_pseudoinverse_oracle(rng):
    x = rng.normal(size=(20, 3))
    y = rng.normal(size=(20, 2))
    w = fit_readout(Dataset(x, y), ridge=0.0)
    w_oracle = (np.linalg.pinv(x) @ y).T
    assert np.abs(w.weights - w_oracle).max() < 1e-8


def test_fit_readout_degenerate_requires_ridge(rng):
    col = rng.normal(size=20)
    x = np.column_stack([col, col])  # exactly collinear
    y = rng.normal(size=(20, 1))
    with pytest.raises(np.linalg.LinAlgError):
        fit_readout(Dataset(x, y), ridge=0.0)
    w = fit_readout(Dataset(x, y), ridge=1e-8)
    assert np.all(np.isfinite(w.weights))


def test_fit_readout_beats_random_weights(rng):
    x = np.column_stack([rng.normal(size=(50, 3)), np.ones(50)])
    y = rng.normal(size=(50, 2))
    w = fit_readout(Dataset(x, y))
    best = square_loss(w.predict(x), y)
    for _ in range(100):
        wr = ReadoutMap(rng.normal(size=(2, 4)))
        assert best <= square_loss(wr.predict(x), y) + 1e-12


def test_square_loss_examples():
    assert square_loss(np.zeros(4), np.zeros(4)) == 0.0
    assert square_loss(np.zeros(4), np.ones(4)) == pytest.approx(1.0)
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.array([[0.0, 1.0], [1.0, 2.0]])
    direct = float(np.sum((a - b) ** 2)) / 2
    assert square_loss(a, b) == pytest.approx(direct, abs=1e-12)


def test_nelder_mead_quadratic():
    x, f = nelder_mead(lambda v: (v[0] - 2.0) ** 2, np.array([0.0]))
    assert x == pytest.approx(2.0, abs=1e-3)


def test_nelder_mead_rosenbrock():
    def rosen(v):
        return (1 - v[0]) ** 2 + 100 * (v[1] - v[0] ** 2) ** 2
    x, f = nelder_mead(rosen, np.array([-1.0, 1.0]), max_iter=500)
    assert f < 1e-2


def test_nelder_mead_constant_objective():
    x, f = nelder_mead(lambda v: 7.0, np.array([1.5]))
    assert x == pytest.approx(1.5, abs=1e-3)
    assert f == 7.0


def test_pearson_exact_and_affine():
    m = np.array([0.0, 1, 1, 0, 1, 0, 0, 1])
    assert pearson_r_squared(m, m) == pytest.approx(1.0, abs=1e-12)
    assert pearson_r_squared(m, 3.2 * m - 1.1) == pytest.approx(1.0, abs=1e-12)
    assert pearson_r_squared(m, -2.0 * m + 0.3) == pytest.approx(1.0, abs=1e-12)


def test_pearson_degenerate_convention():
    m = np.array([0.0, 1, 0, 1])
    assert pearson_r_squared(m, np.full(4, 0.7)) == 0.0
    assert pearson_r_squared(np.ones(4), np.array([0.1, 0.2, 0.3, 0.4])) == 0.0


def test_pearson_null_distribution(rng):
    m = (rng.random(1000) > 0.5).astype(float)
    y = rng.normal(size=1000)
    assert pearson_r_squared(m, y) < 0.01


def test_gaussian_perturb_identity_at_zero_sigma(rng):
    assert gaussian_perturb(1.23, 0.0, rng) == 1.23


def test_gaussian_perturb_moments(rng):
    n = 100_000
    sigma = 0.37
    draws = np.array([gaussian_perturb(2.0, sigma, rng) for _ in range(1000)])
    # moment checks on a big vectorized draw
    big = gaussian_perturb(np.full(n, 2.0), sigma, rng)
    assert abs(big.mean() - 2.0) < 4 * sigma / np.sqrt(n)
    assert abs(big.var() - sigma ** 2) < 0.05 * sigma ** 2
    assert draws.std() > 0


def test_train_test_split(rng):
    tr, te = train_test_split(100, 0.3, rng)
    assert len(tr) == 70 and len(te) == 30
    assert sorted(np.concatenate([tr, te])) == list(range(100))
