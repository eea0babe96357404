"""Choosing the inner dimension from a reconstruction-error sweep."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InputError, OccupancyNMFError
from .nmf import NmfConfig, check_data, fit

logger = logging.getLogger(__name__)

FLAT_THRESHOLD = 1e-3
_TIE = 1e-12


@dataclass(frozen=True)
class RankSweep:
    ks: tuple[int, ...]
    mse: tuple[float, ...]
    # |X - WH|_F / |X|_F, reported alongside MSE
    rel_error: tuple[float, ...]
    suggested_k: int | None = None
    per_k_fit_meta: tuple[dict, ...] = field(default=())


def sweep(X, k_min: int, k_max: int, base_config: NmfConfig | None = None) -> RankSweep:
    """Refit the factorization for every k in ``[k_min, k_max]``.

    Each fit uses ``base_config`` with only ``k`` changed, so all share one
    initialization strategy and seed. A failing fit is recorded in
    ``per_k_fit_meta`` with NaN errors and the sweep continues.
    """
    base_config = base_config or NmfConfig()
    X = check_data(X)
    if not 1 <= k_min <= k_max < min(X.shape):
        raise InputError(f"need 1 <= kmin <= kmax < min(n, m) = {min(X.shape)}, got {k_min}..{k_max}")
    x_norm = np.linalg.norm(X)
    ks, mse, rel, meta = [], [], [], []
    for k in range(k_min, k_max + 1):
        ks.append(k)
        try:
            result = fit(X, replace(base_config, k=k))
        except OccupancyNMFError as exc:
            logger.warning("fit at k=%d failed: %s", k, exc)
            mse.append(float("nan"))
            rel.append(float("nan"))
            meta.append({"k": k, "iterations": None, "converged": False, "error": str(exc)})
            continue
        R = X - result.W @ result.H
        mse.append(float(np.mean(R**2)))
        rel.append(float(np.linalg.norm(R) / x_norm) if x_norm > 0 else 0.0)
        meta.append({"k": k, "iterations": result.iterations, "converged": result.converged, "error": None})
    out = RankSweep(tuple(ks), tuple(mse), tuple(rel), None, tuple(meta))
    if len(ks) >= 3:
        out = replace(out, suggested_k=suggest_elbow(out))
    return out


def suggest_elbow(result: RankSweep) -> int | None:
    """k with the largest second difference of log-MSE, or None for a flat curve.

    Only interior points qualify. Ties go to the smaller k. Zero MSE is
    floored at the smallest positive double before taking logs; failed fits
    (NaN) are skipped.
    """
    if len(result.ks) < 3:
        raise InputError("elbow detection needs at least 3 sweep points")
    ks = np.asarray(result.ks)
    mse = np.asarray(result.mse, dtype=np.float64)
    ok = np.isfinite(mse)
    ks, mse = ks[ok], mse[ok]
    if ks.size < 3:
        return None
    log_mse = np.log(np.maximum(mse, np.finfo(np.float64).tiny))
    d2 = log_mse[:-2] - 2 * log_mse[1:-1] + log_mse[2:]
    best = d2.max()
    if best < FLAT_THRESHOLD:
        return None
    return int(ks[1:-1][np.flatnonzero(d2 >= best - _TIE)[0]])
