"""Starting points for the NMF solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import InputError, NumericalError


@dataclass(frozen=True, eq=False)
class SvdTriplets:
    U: np.ndarray  # n x k, orthonormal columns
    sigma: np.ndarray  # k, non-increasing
    V: np.ndarray  # m x k, orthonormal columns


def init_random(n: int, m: int, k: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Uniform(0, 1) factors from a seeded generator."""
    if min(n, m, k) < 1:
        raise InputError(f"dimensions must be positive, got n={n}, m={m}, k={k}")
    rng = np.random.default_rng(seed)
    W = rng.random((n, k))
    H = rng.random((k, m))
    return W, H


def truncated_svd(X, k: int) -> SvdTriplets:
    """Leading ``k`` singular triplets of ``X``.

    Signs are fixed so that the largest-magnitude entry of every ``U``
    column is non-negative, which makes the result deterministic.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InputError(f"expected a 2-d array, got shape {X.shape}")
    if not 1 <= k <= min(X.shape):
        raise InputError(f"k={k} out of range: need 1 <= k <= min(n, m) = {min(X.shape)}")
    try:
        U, s, Vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from None
    U, s, V = U[:, :k].copy(), s[:k].copy(), Vt[:k].T.copy()
    pivots = np.argmax(np.abs(U), axis=0)
    signs = np.where(U[pivots, np.arange(k)] < 0, -1.0, 1.0)
    return SvdTriplets(U * signs, s, V * signs)


def init_nndsvd(X, k: int, variant: str = "nndsvd", seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Non-negative double SVD initialization.

    Each singular pair is split into positive and negative parts; the part
    with the larger norm product is kept and the singular value is shared
    between ``W`` and ``H`` as a square root. ``variant`` controls what
    happens to the zeros this leaves behind:

    ``nndsvd``
        keep them (solvers using multiplicative updates cannot move them);
    ``nndsvda``
        fill with ``mean(X)``;
    ``nndsvdar``
        fill with Uniform(0, mean(X)/100) draws from ``seed``.
    """
    if variant not in ("nndsvd", "nndsvda", "nndsvdar"):
        raise InputError(f"unknown nndsvd variant {variant!r}")
    X = np.asarray(X, dtype=np.float64)
    if np.any(X < 0):
        raise InputError("NNDSVD needs a non-negative matrix")
    n, m = X.shape
    svd = truncated_svd(X, k)
    U, S, V = svd.U, svd.sigma, svd.V
    W = np.zeros((n, k))
    H = np.zeros((k, m))

    W[:, 0] = np.sqrt(S[0]) * np.abs(U[:, 0])
    H[0, :] = np.sqrt(S[0]) * np.abs(V[:, 0])
    for j in range(1, k):
        x, y = U[:, j], V[:, j]
        xp, yp = np.maximum(x, 0), np.maximum(y, 0)
        xn, yn = np.maximum(-x, 0), np.maximum(-y, 0)
        xp_norm, yp_norm = np.linalg.norm(xp), np.linalg.norm(yp)
        xn_norm, yn_norm = np.linalg.norm(xn), np.linalg.norm(yn)
        mu_pos, mu_neg = xp_norm * yp_norm, xn_norm * yn_norm
        if mu_pos >= mu_neg:
            u, v, mu, u_norm, v_norm = xp, yp, mu_pos, xp_norm, yp_norm
        else:
            u, v, mu, u_norm, v_norm = xn, yn, mu_neg, xn_norm, yn_norm
        if mu == 0:
            continue
        scale = np.sqrt(S[j] * mu)
        W[:, j] = scale * u / u_norm
        H[j, :] = scale * v / v_norm

    if variant == "nndsvda":
        fill = X.mean()
        W[W == 0] = fill
        H[H == 0] = fill
    elif variant == "nndsvdar":
        rng = np.random.default_rng(seed)
        high = X.mean() / 100
        w_zero, h_zero = W == 0, H == 0
        W[w_zero] = _open_uniform(rng, high, w_zero.sum())
        H[h_zero] = _open_uniform(rng, high, h_zero.sum())
    return W, H


def _open_uniform(rng, high, size):
    # draws in (0, high); random() can return exactly 0
    u = rng.random(size)
    return high * np.where(u == 0, 0.5, u)


def initialize(X, config) -> tuple[np.ndarray, np.ndarray]:
    n, m = X.shape
    if config.init == "random":
        return init_random(n, m, config.k, config.seed)
    return init_nndsvd(X, config.k, config.init, config.seed)
