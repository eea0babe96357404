import numpy as np
import pytest

from occupancy_nmf.exceptions import InputError
from occupancy_nmf.nmf import NmfConfig, check_data, fit
from occupancy_nmf.synth import norlin_like, planted_matrix


def test_norlin_shaped_problem_converges():
    X = planted_matrix(norlin_like(), seed=0)
    assert X.shape == (144, 77)
    f = fit(X, NmfConfig(k=4))
    assert f.converged and f.iterations <= 500


def test_zero_matrix():
    f = fit(np.zeros((10, 8)), NmfConfig(k=2))
    assert f.objective == 0.0 and f.converged
    assert not f.W.any() and not f.H.any()


@pytest.mark.parametrize("init", ["random", "nndsvd", "nndsvda", "nndsvdar"])
@pytest.mark.parametrize("solver", ["multiplicative", "coordinate_descent"])
def test_deterministic(init, solver):
    X = np.random.default_rng(1).random((20, 15))
    cfg = NmfConfig(k=3, init=init, solver=solver, seed=9)
    a, b = fit(X, cfg), fit(X, cfg)
    assert np.array_equal(a.W, b.W) and np.array_equal(a.H, b.H)
    assert a.objective_trace == b.objective_trace


@pytest.mark.parametrize("bad", [np.ones(4), np.empty((0, 3)), -np.ones((3, 3)), np.full((3, 3), np.nan)])
def test_check_data(bad):
    with pytest.raises(InputError):
        check_data(bad)


@pytest.mark.parametrize("k", [0, 5, 7])
def test_k_range(k):
    with pytest.raises(InputError, match="k"):
        fit(np.ones((5, 6)), NmfConfig(k=k))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(beta=3),
        dict(alpha=-1.0),
        dict(rho=1.5),
        dict(alpha=1.0, beta=1, solver="multiplicative"),
        dict(beta=1),
        dict(solver="als"),
        dict(init="svd"),
        dict(tol=0.0),
        dict(max_iter=0),
        dict(seed=-1),
        dict(k=True),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(InputError):
        NmfConfig(**kwargs)


def test_trace_starts_at_initial_objective():
    X = np.random.default_rng(2).random((12, 9))
    f = fit(X, NmfConfig(k=2, max_iter=5, tol=1e-15))
    assert len(f.objective_trace) == f.iterations + 1
    assert f.objective == f.objective_trace[-1]
