"""Alternating NMF solvers.

Multiplicative updates
----------------------
For beta=2 the gradient of the regularized objective with respect to ``H`` is

    W^T W H - W^T X + rho*alpha + alpha*(1 - rho)*H

Every term is non-negative except ``-W^T X``. Splitting the gradient into
its positive part ``P = W^T W H + rho*alpha + alpha*(1 - rho)*H`` and
negative part ``N = W^T X`` and taking the step ``H <- H * N / P`` is a
gradient step with the per-entry step size ``H / P``. The same step is the
minimizer of the usual diagonal majorizer of the quadratic loss (the L1 term
is linear and the ridge term is separable), so the objective never
increases. ``W`` is updated symmetrically with ``X H^T`` and
``W H H^T``.

For beta in {0, 1} the same split applied to the beta-divergence gradient
``W^T ((WH)^(beta-1) - X * (WH)^(beta-2))`` gives

    H <- H * [W^T (X * (WH)^(beta-2)) / W^T (WH)^(beta-1)] ** gamma

with ``gamma = 1/(2 - beta)`` for beta < 1 and ``gamma = 1`` for beta = 1.
The exponent is what makes the Itakura-Saito update a majorize-minimize
step.

Every denominator gets ``EPS`` added; entries that are exactly zero stay
zero.

Coordinate descent
------------------
HALS: one column of ``W`` (or row of ``H``) at a time, each set to the
non-negative minimizer of the objective with everything else fixed,

    w_j <- max(0, ((X H^T)_j - sum_{l != j} w_l (H H^T)_lj - rho*alpha)
                  / ((H H^T)_jj + alpha*(1 - rho)))

Stopping rule for both: ``|f_t - f_{t-1}| / f_0 < tol`` where ``f_0`` is the
objective at the starting point, or ``max_iter`` iterations.
"""

from __future__ import annotations

import logging

import numpy as np

from ..exceptions import InputError, NumericalError
from .config import Factorization, NmfConfig
from .divergence import matrix_divergence, penalty

logger = logging.getLogger(__name__)

EPS = 1e-12


def _check_inputs(X, W0, H0):
    X = np.asarray(X, dtype=np.float64)
    W = np.array(W0, dtype=np.float64)
    H = np.array(H0, dtype=np.float64)
    if X.ndim != 2 or W.ndim != 2 or H.ndim != 2:
        raise InputError("X, W0 and H0 must be 2-d")
    if W.shape[0] != X.shape[0] or H.shape[1] != X.shape[1] or W.shape[1] != H.shape[0]:
        raise InputError(f"non-conforming shapes: X {X.shape}, W0 {W.shape}, H0 {H.shape}")
    if np.any(W < 0) or np.any(H < 0):
        raise InputError("initial factors must be non-negative")
    return X, W, H


def _loss(X, W, H, config):
    if config.beta == 2:
        R = X - W @ H
        return 0.5 * float(np.vdot(R, R)) + penalty(W, H, config.alpha, config.rho)
    return matrix_divergence(X, np.maximum(W @ H, EPS), config.beta, limit_at_zero=True)


def _iterate(X, W, H, config, sweep, update_W):
    trace = [_loss(X, W, H, config)]
    if not np.isfinite(trace[0]):
        raise NumericalError("objective is not finite at the initial point", iteration=0)
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        sweep(X, W, H, config, update_W)
        f = _loss(X, W, H, config)
        if not np.isfinite(f):
            raise NumericalError(f"objective became {f} at iteration {it}", iteration=it)
        trace.append(f)
        if trace[0] == 0 or abs(trace[-2] - f) / trace[0] < config.tol:
            converged = True
            break
    if not converged:
        logger.info("no convergence after %d iterations (tol=%g)", it, config.tol)
    return Factorization(
        W=W, H=H, objective_trace=tuple(trace), iterations=it, converged=converged, config=config
    )


def _mu_sweep_frobenius(X, W, H, config, update_W):
    l1 = config.rho * config.alpha
    l2 = config.alpha * (1.0 - config.rho)
    WtW = W.T @ W
    denom = WtW @ H + l1 + EPS
    if l2:
        denom += l2 * H
    H *= (W.T @ X) / denom
    if update_W:
        HHt = H @ H.T
        denom = W @ HHt + l1 + EPS
        if l2:
            denom += l2 * W
        W *= (X @ H.T) / denom


def _mu_sweep_beta(X, W, H, config, update_W):
    beta = config.beta
    gamma = 1.0 / (2.0 - beta) if beta < 1 else 1.0

    def ratio(V, factor_t, left):
        # left=True: update for H (W^T ...), else for W (... H^T)
        if beta == 1:
            num = X / V
            den = np.ones_like(V)
        else:
            num = X * V ** (beta - 2)
            den = V ** (beta - 1)
        if left:
            r = (factor_t @ num) / (factor_t @ den + EPS)
        else:
            r = (num @ factor_t) / (den @ factor_t + EPS)
        return r if gamma == 1.0 else r**gamma

    V = np.maximum(W @ H, EPS)
    H *= ratio(V, W.T, True)
    if update_W:
        V = np.maximum(W @ H, EPS)
        W *= ratio(V, H.T, False)


def solve_mu(X, W0, H0, config: NmfConfig, update_W: bool = True) -> Factorization:
    """Multiplicative-update solver; ``H`` is updated before ``W`` each iteration.

    With ``update_W=False`` only ``H`` moves (used to project new data onto
    fixed components).
    """
    X, W, H = _check_inputs(X, W0, H0)
    if config.beta == 0 and np.any(X <= 0):
        raise InputError("beta=0 (Itakura-Saito) needs strictly positive data")
    sweep = _mu_sweep_frobenius if config.beta == 2 else _mu_sweep_beta
    return _iterate(X, W, H, config, sweep, update_W)


def _hals_update(F, A, B, l1, l2):
    """Update the rows of ``F`` (k x p) in place given ``A = G^T X``-style cross term and Gram ``B``."""
    k = F.shape[0]
    for j in range(k):
        den = B[j, j] + l2
        if den <= 0:
            F[j] = 0.0
            continue
        num = A[j] - B[j] @ F + B[j, j] * F[j] - l1
        F[j] = np.maximum(num / den, 0.0)


def _cd_sweep(X, W, H, config, update_W):
    l1 = config.rho * config.alpha
    l2 = config.alpha * (1.0 - config.rho)
    _hals_update(H, W.T @ X, W.T @ W, l1, l2)
    if update_W:
        # W^T has the same row structure as H
        Wt = W.T.copy()
        _hals_update(Wt, H @ X.T, H @ H.T, l1, l2)
        W[...] = Wt.T


def solve_cd(X, W0, H0, config: NmfConfig, update_W: bool = True) -> Factorization:
    """HALS coordinate-descent solver for the beta=2 objective."""
    if config.beta != 2:
        raise InputError("coordinate_descent supports beta=2 only")
    X, W, H = _check_inputs(X, W0, H0)
    return _iterate(X, W, H, config, _cd_sweep, update_W)
