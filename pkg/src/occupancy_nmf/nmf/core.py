from __future__ import annotations

import numpy as np

from ..exceptions import InputError
from .config import Factorization, NmfConfig
from .init import initialize
from .solvers import solve_cd, solve_mu


def check_data(X) -> np.ndarray:
    """Validate a data matrix: 2-d, finite, element-wise non-negative."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise InputError(f"expected a non-empty 2-d matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputError("data matrix contains NaN or infinite values")
    if np.any(X < 0):
        raise InputError("data matrix has negative entries")
    return X


def fit(X, config: NmfConfig | None = None) -> Factorization:
    """Factorize ``X`` (n x m) into non-negative ``W`` (n x k) and ``H`` (k x m).

    Deterministic for a given ``(X, config)``; randomness comes only from
    ``config.seed``.
    """
    config = config or NmfConfig()
    X = check_data(X)
    config.check_shape(*X.shape)
    W0, H0 = initialize(X, config)
    solve = solve_mu if config.solver == "multiplicative" else solve_cd
    return solve(X, W0, H0, config)
