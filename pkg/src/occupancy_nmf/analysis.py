"""Turning a factorization into device-minutes, component summaries and residuals."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .exceptions import InputError
from .nmf import Factorization

MINUTES_PER_DAY = 1440


@dataclass(frozen=True, eq=False)
class WeightedActivations:
    """``Hw[j, i] = H[j, i] * |W_j|_1 * step_minutes``, in device-minutes per day."""

    Hw: np.ndarray
    component_l1: np.ndarray
    step_minutes: float


@dataclass(frozen=True)
class ComponentSummary:
    component_index: int
    peak_slot: int
    active_slots: tuple[int, ...]
    mean_device_minutes: float
    implied_constant_devices: float


@dataclass(frozen=True)
class DayResidual:
    day: str
    residual_l2: float
    relative_error: float
    rank: int


@dataclass(frozen=True)
class ReconstructionReport:
    mse: float
    days: tuple[DayResidual, ...]  # chronological

    def ranked(self) -> list[DayResidual]:
        return sorted(self.days, key=lambda d: d.rank)


def weight_activations(fact: Factorization, step_minutes: float = 10.0) -> WeightedActivations:
    if not step_minutes > 0:
        raise InputError(f"step_minutes must be positive, got {step_minutes!r}")
    l1 = np.abs(fact.W).sum(axis=0)
    Hw = fact.H * l1[:, None] * step_minutes
    return WeightedActivations(Hw=Hw, component_l1=l1, step_minutes=float(step_minutes))


def normalize_components(fact: Factorization) -> Factorization:
    """Rescale every W column to unit L1 norm, moving the scale into H.

    ``W @ H`` is unchanged. All-zero columns are left alone and their indices
    reported in ``flagged_components``.
    """
    norms = np.abs(fact.W).sum(axis=0)
    zero = norms == 0
    scale = np.where(zero, 1.0, norms)
    return replace(
        fact,
        W=fact.W / scale,
        H=fact.H * scale[:, None],
        flagged_components=tuple(int(j) for j in np.flatnonzero(zero)),
    )


def summarize_components(
    fact: Factorization, step_minutes: float = 10.0, active_fraction: float = 0.5
) -> list[ComponentSummary]:
    """Peak slot, active slots (above ``active_fraction`` of the peak) and
    mean device-minutes for each component."""
    weighted = weight_activations(fact, step_minutes)
    day_minutes = fact.W.shape[0] * step_minutes
    out = []
    for j in range(fact.k):
        w = fact.W[:, j]
        peak = float(w.max())
        active = np.flatnonzero(w > active_fraction * peak) if peak > 0 else np.array([], dtype=int)
        mean_dm = float(weighted.Hw[j].mean())
        out.append(
            ComponentSummary(
                component_index=j,
                peak_slot=int(np.argmax(w)),
                active_slots=tuple(int(i) for i in active),
                mean_device_minutes=mean_dm,
                implied_constant_devices=mean_dm / day_minutes,
            )
        )
    return out


def reconstruction_report(X, fact: Factorization, day_labels=None) -> ReconstructionReport:
    """Per-day residual norms, ranked largest first (rank 1)."""
    X = np.asarray(X, dtype=np.float64)
    WH = fact.W @ fact.H
    if WH.shape != X.shape:
        raise InputError(f"W @ H has shape {WH.shape}, X has {X.shape}")
    m = X.shape[1]
    if day_labels is None:
        day_labels = [str(i) for i in range(m)]
    elif len(day_labels) != m:
        raise InputError(f"{len(day_labels)} day labels for {m} columns")
    R = X - WH
    resid = np.linalg.norm(R, axis=0)
    col = np.linalg.norm(X, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        relative = np.where(col > 0, resid / col, np.where(resid > 0, np.inf, 0.0))
    order = np.argsort(-resid, kind="stable")
    ranks = np.empty(m, dtype=int)
    ranks[order] = np.arange(1, m + 1)
    days = tuple(
        DayResidual(str(day_labels[i]), float(resid[i]), float(relative[i]), int(ranks[i]))
        for i in range(m)
    )
    return ReconstructionReport(mse=float(np.mean(R**2)), days=days)


def match_components(reference, W) -> list[tuple[int, int, float]]:
    """Greedily pair reference columns with columns of ``W`` by cosine similarity.

    Returns ``(reference_index, w_index, cosine)`` triples, best pairs first.
    """
    A = np.asarray(reference, dtype=np.float64)
    B = np.asarray(W, dtype=np.float64)
    an = np.linalg.norm(A, axis=0)
    bn = np.linalg.norm(B, axis=0)
    an[an == 0] = 1.0
    bn[bn == 0] = 1.0
    cos = (A / an).T @ (B / bn)
    pairs = []
    used_a, used_b = set(), set()
    for flat in np.argsort(-cos, axis=None, kind="stable"):
        i, j = np.unravel_index(flat, cos.shape)
        if i in used_a or j in used_b:
            continue
        pairs.append((int(i), int(j), float(cos[i, j])))
        used_a.add(i)
        used_b.add(j)
        if len(used_a) == A.shape[1] or len(used_b) == B.shape[1]:
            break
    return pairs
