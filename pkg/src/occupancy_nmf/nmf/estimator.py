from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted, check_non_negative

from .config import NmfConfig
from .core import fit
from .solvers import solve_cd, solve_mu


class DailyNMF(TransformerMixin, BaseEstimator):
    """NMF estimator with days as samples.

    Follows the scikit-learn orientation: ``X`` is ``(n_days, n_slots)``,
    i.e. the transpose of the days-as-columns data matrix. After ``fit``,
    ``components_`` holds the daily patterns as rows (``W.T``) and
    ``transform`` returns per-day weights (``H.T``).

    Parameters
    ----------
    n_components : int
        Inner dimension k.
    beta : {0, 1, 2}
        Beta-divergence of the fitting loss.
    alpha, rho : float
        Regularization intensity and L1/L2 mixing (beta=2 only).
    solver : {"coordinate_descent", "multiplicative"}
    init : {"nndsvdar", "nndsvd", "nndsvda", "random"}
    tol : float
        Relative objective change stopping threshold.
    max_iter : int
    random_state : int
        Seed for random and nndsvdar initialization.
    """

    def __init__(
        self,
        n_components=4,
        beta=2,
        alpha=0.0,
        rho=0.0,
        solver="coordinate_descent",
        init="nndsvdar",
        tol=1e-5,
        max_iter=500,
        random_state=0,
    ):
        self.n_components = n_components
        self.beta = beta
        self.alpha = alpha
        self.rho = rho
        self.solver = solver
        self.init = init
        self.tol = tol
        self.max_iter = max_iter
        self.random_state = random_state

    def _config(self) -> NmfConfig:
        return NmfConfig(
            k=self.n_components,
            beta=self.beta,
            alpha=self.alpha,
            rho=self.rho,
            solver=self.solver,
            init=self.init,
            tol=self.tol,
            max_iter=self.max_iter,
            seed=0 if self.random_state is None else self.random_state,
        )

    def _validate(self, X, reset):
        X = check_array(X, dtype=np.float64)
        check_non_negative(X, f"{type(self).__name__}")
        if reset:
            self.n_features_in_ = X.shape[1]
        elif X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"X has {X.shape[1]} features, but {type(self).__name__} "
                f"is expecting {self.n_features_in_} features as input."
            )
        return X

    def fit_transform(self, X, y=None):
        X = self._validate(X, reset=True)
        result = fit(X.T, self._config())
        self.factorization_ = result
        self.components_ = result.W.T.copy()
        self.n_components_ = result.k
        self.n_iter_ = result.iterations
        self.converged_ = result.converged
        self.objective_trace_ = np.asarray(result.objective_trace)
        self.reconstruction_err_ = float(np.linalg.norm(X.T - result.W @ result.H))
        return result.H.T.copy()

    def fit(self, X, y=None):
        self.fit_transform(X)
        return self

    def transform(self, X):
        """Per-day weights for new days, with the fitted patterns held fixed."""
        check_is_fitted(self, "components_")
        X = self._validate(X, reset=False)
        config = self._config()
        W = self.components_.T
        rng = np.random.default_rng(config.seed)
        H0 = rng.random((W.shape[1], X.shape[0]))
        solve = solve_mu if config.solver == "multiplicative" else solve_cd
        return solve(X.T, W, H0, config, update_W=False).H.T

    def inverse_transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=np.float64)
        return X @ self.components_
