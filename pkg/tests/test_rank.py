import numpy as np
import pytest

from occupancy_nmf.exceptions import InputError
from occupancy_nmf.nmf import NmfConfig
from occupancy_nmf.rank import RankSweep, suggest_elbow, sweep


def _curve(mse):
    return RankSweep(ks=tuple(range(1, len(mse) + 1)), mse=tuple(mse), rel_error=tuple(mse))


def test_elbow_hand_example():
    assert suggest_elbow(_curve([100, 10, 9.5, 9.4, 9.3])) == 2


def test_flat_curve_has_no_elbow():
    assert suggest_elbow(_curve([5.0] * 6)) is None


def test_tie_goes_to_smaller_k():
    # log-mse second differences equal at k=2 and k=4
    mse = np.exp([4.0, 2.0, 2.0, 0.0, 0.0])
    assert suggest_elbow(_curve(mse)) == 2


def test_zero_mse_is_floored():
    # the drop onto the floor dominates: second difference peaks at k=3
    assert suggest_elbow(_curve([10.0, 1.0, 0.0, 0.0])) == 3


def test_nan_points_skipped():
    assert suggest_elbow(_curve([100, float("nan"), 10, 9.5, 9.4])) == 3


def test_too_few_points():
    with pytest.raises(InputError):
        suggest_elbow(_curve([3.0, 1.0]))


def test_exact_rank_two():
    rng = np.random.default_rng(1)
    X = rng.random((20, 2)) @ rng.random((2, 15))
    r = sweep(X, 1, 5, NmfConfig(tol=1e-10, max_iter=2000))
    assert r.ks == (1, 2, 3, 4, 5)
    assert r.mse[1] < 1e-8
    assert all(b <= a + 1e-9 for a, b in zip(r.mse, r.mse[1:]))
    assert r.suggested_k == 2
    assert [m["k"] for m in r.per_k_fit_meta] == list(r.ks)


def test_zero_matrix_sweep():
    r = sweep(np.zeros((10, 8)), 1, 4)
    assert r.mse == (0.0,) * 4 and r.rel_error == (0.0,) * 4
    assert r.suggested_k is None


def test_relative_error_definition():
    X = np.random.default_rng(3).random((12, 10))
    r = sweep(X, 2, 2)
    assert r.rel_error[0] == pytest.approx(np.sqrt(r.mse[0] * X.size) / np.linalg.norm(X))
    assert r.suggested_k is None


@pytest.mark.parametrize("kmin,kmax", [(0, 3), (3, 2), (1, 8)])
def test_range_validation(kmin, kmax):
    with pytest.raises(InputError):
        sweep(np.ones((8, 9)), kmin, kmax)
