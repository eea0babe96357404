import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from occupancy_nmf.exceptions import InputError, NumericalError
from occupancy_nmf.nmf import NmfConfig, fit, init_random, solve_cd, solve_mu, truncated_svd

MU = NmfConfig(k=1, solver="multiplicative", init="random")


def _planted(n, m, k, seed):
    rng = np.random.default_rng(seed)
    W, H = rng.random((n, k)), rng.random((k, m))
    return W @ H, W, H


@pytest.mark.parametrize("solve", [solve_mu, solve_cd])
def test_exact_start_is_fixed_point(solve):
    X, W, H = _planted(8, 6, 2, 0)
    cfg = NmfConfig(k=2, solver="multiplicative")
    f = solve(X, W, H, cfg)
    assert f.iterations == 1 and f.converged
    assert f.objective < 1e-20
    assert len(f.objective_trace) == 2


def test_mu_one_by_one_by_hand():
    f = solve_mu([[4.0]], [[1.0]], [[1.0]], MU)
    assert f.objective_trace[0] == 4.5
    # EPS in the denominators perturbs the hand result at the 1e-12 level
    assert f.H[0, 0] == pytest.approx(4.0, rel=1e-11)
    assert f.reconstruct()[0, 0] == pytest.approx(4.0, rel=1e-11)
    assert f.objective_trace[1] < 1e-20


@pytest.mark.parametrize("seed", range(50))
def test_mu_frobenius_is_monotone(seed):
    X = np.random.default_rng(seed).random((30, 20))
    W0, H0 = init_random(30, 20, 5, seed)
    f = solve_mu(X, W0, H0, NmfConfig(k=5, solver="multiplicative", max_iter=200, tol=1e-12))
    assert np.all(np.diff(f.objective_trace) <= 1e-12 * f.objective_trace[0])


@pytest.mark.parametrize("beta", [0, 1])
def test_mu_beta_divergences_decrease(beta):
    X, _, _ = _planted(25, 15, 3, 1)
    W0, H0 = init_random(25, 15, 3, 2)
    cfg = NmfConfig(k=3, beta=beta, solver="multiplicative", max_iter=200, tol=1e-12)
    f = solve_mu(X, W0, H0, cfg)
    assert np.all(np.diff(f.objective_trace) <= 1e-9 * f.objective_trace[0])
    assert f.objective < 1e-2 * f.objective_trace[0]


def test_mu_kl_accepts_zeros_in_data():
    X = np.random.default_rng(2).random((10, 8))
    X[0, 0] = 0.0
    f = fit(X, NmfConfig(k=2, beta=1, solver="multiplicative"))
    assert np.isfinite(f.objective)


def test_itakura_saito_needs_positive_data():
    X = np.ones((4, 4))
    X[1, 1] = 0
    with pytest.raises(InputError):
        fit(X, NmfConfig(k=1, beta=0, solver="multiplicative"))


@pytest.mark.parametrize("solver", ["multiplicative", "coordinate_descent"])
@pytest.mark.parametrize("rho", [0.0, 0.5, 1.0])
def test_regularized_objective_decreases(solver, rho):
    X = np.random.default_rng(3).random((30, 20))
    f = fit(X, NmfConfig(k=4, alpha=0.5, rho=rho, solver=solver, tol=1e-10, max_iter=300))
    assert np.all(np.diff(f.objective_trace) <= 1e-10 * f.objective_trace[0])


def test_cd_sweeps_are_monotone():
    X = np.random.default_rng(5).random((40, 30))
    f = fit(X, NmfConfig(k=6, tol=1e-12, max_iter=300))
    assert np.all(np.diff(f.objective_trace) <= 1e-12 * f.objective_trace[0])


def test_cd_respects_svd_lower_bound():
    ratios = []
    for seed in range(20):
        X = np.random.default_rng(seed).random((30, 20))
        t = truncated_svd(X, 20)
        bound = 0.5 * np.sum(t.sigma[5:] ** 2)
        f = fit(X, NmfConfig(k=5, seed=seed))
        assert f.objective >= bound * (1 - 1e-12)
        ratios.append(f.objective / bound)
    assert np.mean(ratios) <= 1.25


@pytest.mark.parametrize("solver", ["multiplicative", "coordinate_descent"])
def test_strong_l1_shrinks_to_zero(solver):
    X = np.random.default_rng(0).random((30, 20))
    f = fit(X, NmfConfig(k=3, alpha=1e6, rho=1.0, solver=solver))
    assert np.abs(f.W).sum() + np.abs(f.H).sum() < 1e-6


def test_cd_requires_beta2():
    with pytest.raises(InputError):
        solve_cd(np.ones((2, 2)), np.ones((2, 1)), np.ones((1, 2)), NmfConfig(k=1, beta=1, solver="multiplicative"))


def test_shape_mismatch():
    with pytest.raises(InputError):
        solve_mu(np.ones((3, 3)), np.ones((2, 1)), np.ones((1, 3)), MU)


def test_negative_start_rejected():
    with pytest.raises(InputError):
        solve_mu(np.ones((3, 3)), -np.ones((3, 1)), np.ones((1, 3)), MU)


def test_overflow_reports_iteration():
    X = np.full((3, 3), 1e200)
    with pytest.raises(NumericalError) as info:
        solve_mu(X, np.ones((3, 1)), np.ones((1, 3)), MU)
    assert info.value.iteration is not None


def test_update_w_false_keeps_w():
    X, W, _ = _planted(10, 7, 2, 4)
    H0 = np.full((2, 7), 0.5)
    for solve in (solve_mu, solve_cd):
        f = solve(X, W, H0, NmfConfig(k=2, solver="multiplicative", tol=1e-12, max_iter=2000), update_W=False)
        assert np.array_equal(f.W, W)
        assert np.allclose(f.reconstruct(), X, atol=1e-5)


def test_max_iter_stops_unconverged():
    X = np.random.default_rng(0).random((30, 20))
    f = fit(X, NmfConfig(k=5, max_iter=3, tol=1e-15))
    assert f.iterations == 3 and not f.converged and len(f.objective_trace) == 4


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 12),
    m=st.integers(2, 12),
    seed=st.integers(0, 2**32 - 1),
    solver=st.sampled_from(["multiplicative", "coordinate_descent"]),
)
def test_factors_stay_non_negative(n, m, seed, solver):
    k = min(n, m) - 1
    X = np.random.default_rng(seed).random((n, m))
    f = fit(X, NmfConfig(k=k, solver=solver, seed=seed % 1000, max_iter=50))
    assert f.W.min() >= 0 and f.H.min() >= 0
    assert np.all(np.diff(f.objective_trace) <= 1e-10 * f.objective_trace[0])
