import numpy as np
import pytest

from occupancy_nmf.exceptions import InputError
from occupancy_nmf.nmf import init_nndsvd, init_random, truncated_svd


def test_random_is_seeded_and_in_unit_interval():
    a = init_random(144, 77, 4, seed=5)
    b = init_random(144, 77, 4, seed=5)
    c = init_random(144, 77, 4, seed=6)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not np.array_equal(a[0], c[0])
    for M in a:
        assert M.min() >= 0 and M.max() < 1
    assert a[0].shape == (144, 4) and a[1].shape == (4, 77)


def test_svd_of_diagonal():
    t = truncated_svd(np.diag([3.0, 2.0, 1.0]), 2)
    assert np.allclose(t.sigma, [3, 2], rtol=0, atol=1e-14)


def test_svd_rank_one_tail_vanishes():
    u, v = np.array([1.0, 2, 3]), np.array([4.0, 0.5, 1, 2])
    t = truncated_svd(np.outer(u, v), 2)
    assert t.sigma[1] < 1e-10


def test_svd_tail_energy_matches_eigen_oracle():
    X = np.random.default_rng(2).random((10, 8))
    t = truncated_svd(X, 3)
    resid = np.linalg.norm(X - t.U @ np.diag(t.sigma) @ t.V.T, "fro") ** 2
    eig = np.sort(np.clip(np.linalg.eigvalsh(X.T @ X), 0, None))[::-1]
    assert resid == pytest.approx(eig[3:].sum(), rel=1e-8)


def test_svd_sign_convention_and_orthonormality():
    X = np.random.default_rng(4).random((12, 9))
    t = truncated_svd(X, 4)
    assert np.allclose(t.U.T @ t.U, np.eye(4), atol=1e-12)
    assert np.allclose(t.V.T @ t.V, np.eye(4), atol=1e-12)
    piv = np.argmax(np.abs(t.U), axis=0)
    assert np.all(t.U[piv, range(4)] >= 0)


@pytest.mark.parametrize("k", [0, 9])
def test_svd_k_range(k):
    with pytest.raises(InputError):
        truncated_svd(np.ones((8, 9)), k)


def test_nndsvd_rank_one_reconstructs():
    w, h = np.array([1.0, 2, 3, 0.5]), np.array([0.2, 1.0, 4.0])
    X = np.outer(w, h)
    W, H = init_nndsvd(X, 1)
    assert np.allclose(W[:, 0] / W[0, 0], w / w[0])
    assert np.allclose(H[0] / H[0, 0], h / h[0])
    assert np.allclose(W @ H, X, rtol=0, atol=1e-8)


def test_nndsvdar_fills_zeros_with_small_positive_values():
    X = np.random.default_rng(8).random((20, 15))
    W0, H0 = init_nndsvd(X, 5, "nndsvd")
    W, H = init_nndsvd(X, 5, "nndsvdar", seed=3)
    assert (W0 == 0).any()
    for base, filled in ((W0, W), (H0, H)):
        zero = base == 0
        assert np.all(filled[zero] > 0) and np.all(filled[zero] < X.mean() / 100)
        assert np.array_equal(filled[~zero], base[~zero])
    W2, H2 = init_nndsvd(X, 5, "nndsvdar", seed=3)
    assert np.array_equal(W, W2) and np.array_equal(H, H2)


def test_nndsvda_fills_with_mean():
    X = np.random.default_rng(9).random((20, 15))
    W0, _ = init_nndsvd(X, 5, "nndsvd")
    W, _ = init_nndsvd(X, 5, "nndsvda")
    assert np.all(W[W0 == 0] == X.mean())


@pytest.mark.parametrize("variant", ["nndsvd", "nndsvda", "nndsvdar"])
def test_nndsvd_non_negative_property(variant):
    rng = np.random.default_rng(100)
    for trial in range(100):
        X = rng.random((20, 15)) * rng.integers(0, 2, (20, 15))
        W, H = init_nndsvd(X, 1 + trial % 6, variant, seed=trial)
        assert W.min() >= 0 and H.min() >= 0


def test_nndsvd_rejects_negative_input():
    with pytest.raises(InputError):
        init_nndsvd(-np.ones((3, 3)), 1)
