import math

import numpy as np
import pytest

from occupancy_nmf.nmf import NmfConfig, beta_divergence, matrix_divergence, objective
from occupancy_nmf.nmf.divergence import penalty


@pytest.mark.parametrize("beta", [0, 1, 2, 0.5, 1.5, 3])
def test_equal_arguments_give_zero(beta):
    assert beta_divergence(3.0, 3.0, beta) == pytest.approx(0.0, abs=1e-14)


def test_beta2_hand_value():
    assert beta_divergence(3.0, 1.0, 2) == 2.0


def test_beta1_hand_value():
    assert beta_divergence(2.0, 1.0, 1) == pytest.approx(2 * math.log(2) - 1, rel=1e-12)


def test_beta0_hand_value():
    # z/y - log(z/y) - 1 with z/y = 2
    assert beta_divergence(2.0, 1.0, 0) == pytest.approx(1 - math.log(2), rel=1e-12)


def test_generic_beta_formula():
    z, y, b = 3.0, 2.0, 0.5
    expected = (z**b + (b - 1) * y**b - b * z * y ** (b - 1)) / (b * (b - 1))
    assert beta_divergence(z, y, b) == pytest.approx(expected, rel=1e-12)


def test_zero_data_limits():
    assert beta_divergence(0.0, 2.5, 1, limit_at_zero=True) == 2.5
    with pytest.raises(ValueError):
        beta_divergence(0.0, 2.5, 1)
    with pytest.raises(ValueError):
        beta_divergence(0.0, 2.5, 0)
    assert beta_divergence(0.0, 2.0, 2) == 2.0


def test_nonpositive_model_rejected():
    with pytest.raises(ValueError):
        beta_divergence(1.0, 0.0, 2)


def test_matrix_identity_and_sum_of_scalars():
    X = np.array([[3.0, 1.0]])
    assert matrix_divergence(X, X, 2) == 0.0
    assert matrix_divergence(X, np.array([[1.0, 1.0]]), 2) == 2.0


@pytest.mark.parametrize("seed", range(5))
def test_matrix_beta2_is_half_frobenius(seed):
    rng = np.random.default_rng(seed)
    X, Y = rng.random((5, 5)), rng.random((5, 5)) + 0.1
    assert matrix_divergence(X, Y, 2) == pytest.approx(0.5 * np.linalg.norm(X - Y, "fro") ** 2, rel=1e-12)


@pytest.mark.parametrize("beta", [0, 1])
def test_matrix_matches_elementwise_sum(beta):
    rng = np.random.default_rng(11)
    X, Y = rng.random((4, 6)) + 0.1, rng.random((4, 6)) + 0.1
    expected = sum(beta_divergence(x, y, beta) for x, y in zip(X.ravel(), Y.ravel()))
    assert matrix_divergence(X, Y, beta) == pytest.approx(expected, rel=1e-12)


def test_objective_exact_factorization_is_zero():
    rng = np.random.default_rng(0)
    W, H = rng.random((6, 2)), rng.random((2, 5))
    assert objective(W @ H, W, H, NmfConfig(k=2)) == pytest.approx(0.0, abs=1e-24)


def test_objective_hand_values():
    one = np.ones((1, 1))
    assert objective(one, one, one, NmfConfig(k=1, alpha=1.0, rho=1.0)) == 2.0
    assert objective(one, one, one, NmfConfig(k=1, alpha=1.0, rho=0.0)) == 1.0


def test_penalty_mixes_l1_and_ridge():
    W, H = np.full((2, 1), 2.0), np.full((1, 3), 1.0)
    # l1 = 4 + 3 = 7, squared = 8 + 3 = 11
    assert penalty(W, H, 2.0, 0.25) == pytest.approx(0.25 * 2 * 7 + 0.5 * 2 * 0.75 * 11)
