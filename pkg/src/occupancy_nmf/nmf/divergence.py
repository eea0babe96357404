"""Beta-divergences and the regularized objective."""

from __future__ import annotations

import math

import numpy as np

from ..exceptions import InputError


def beta_divergence(z: float, y: float, beta: float, limit_at_zero: bool = False) -> float:
    """Scalar beta-divergence ``d_beta(z | y)``.

    beta=0 is Itakura-Saito, beta=1 Kullback-Leibler, beta=2 half the squared
    difference. ``y`` must be positive. For beta in {0, 1} ``z`` must also be
    positive, except that ``limit_at_zero=True`` lets beta=1 take its limit
    ``d_1(0 | y) = y``.
    """
    if not y > 0:
        raise InputError(f"y must be positive, got {y!r}")
    if z < 0:
        raise InputError(f"z must be non-negative, got {z!r}")
    if beta == 0:
        if z == 0:
            raise InputError("Itakura-Saito divergence is undefined at z=0")
        r = z / y
        return r - math.log(r) - 1.0
    if beta == 1:
        if z == 0:
            if limit_at_zero:
                return float(y)
            raise InputError("KL divergence at z=0 needs limit_at_zero=True")
        return z * math.log(z / y) - z + y
    return (z**beta + (beta - 1) * y**beta - beta * z * y ** (beta - 1)) / (beta * (beta - 1))


def matrix_divergence(X, Y, beta: float, limit_at_zero: bool = False) -> float:
    """Sum of element-wise beta-divergences between same-shaped arrays."""
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if X.shape != Y.shape:
        raise InputError(f"shape mismatch: {X.shape} vs {Y.shape}")
    if beta == 2:
        diff = X - Y
        return 0.5 * float(np.vdot(diff, diff))
    if np.any(Y <= 0):
        raise InputError("Y must be positive for beta in {0, 1} and fractional beta")
    if beta == 0:
        if np.any(X <= 0):
            raise InputError("Itakura-Saito divergence needs X > 0")
        R = X / Y
        return float(np.sum(R - np.log(R) - 1.0))
    if beta == 1:
        pos = X > 0
        if not limit_at_zero and not pos.all():
            raise InputError("KL divergence with zeros in X needs limit_at_zero=True")
        xlogx = np.zeros_like(X)
        xlogx[pos] = X[pos] * np.log(X[pos] / Y[pos])
        return float(np.sum(xlogx - X + Y))
    return float(
        np.sum(X**beta + (beta - 1) * Y**beta - beta * X * Y ** (beta - 1)) / (beta * (beta - 1))
    )


def penalty(W, H, alpha: float, rho: float) -> float:
    if alpha == 0:
        return 0.0
    l1 = float(np.sum(W) + np.sum(H))  # W, H >= 0
    fro = float(np.vdot(W, W) + np.vdot(H, H))
    return rho * alpha * l1 + 0.5 * alpha * (1.0 - rho) * fro


def objective(X, W, H, config) -> float:
    """Value of the fitting objective for factors ``W``, ``H``.

    For beta=2 this is ``0.5*|X - WH|_F^2`` plus the elastic-net penalty; for
    beta in {0, 1} (unregularized) it is the summed beta-divergence.
    """
    X = np.asarray(X, dtype=np.float64)
    if config.alpha > 0 and config.beta != 2:
        raise InputError("regularization (alpha > 0) is only defined for beta=2")
    WH = np.asarray(W) @ np.asarray(H)
    if WH.shape != X.shape:
        raise InputError(f"W @ H has shape {WH.shape}, X has {X.shape}")
    if config.beta == 2:
        return matrix_divergence(X, WH, 2) + penalty(W, H, config.alpha, config.rho)
    return matrix_divergence(X, WH, config.beta, limit_at_zero=True)
