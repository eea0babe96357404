"""Static SVG figures for a pipeline run."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import atomic_write  # noqa: E402

# fixed element ids and no timestamp, so reruns give identical files
matplotlib.rcParams["svg.hashsalt"] = "occupancy-nmf"


def _save(fig, path):
    import io

    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write(path, buf.getvalue())


def _hours(n):
    return np.arange(n) * 24.0 / n


def plot_series(path, values, step_minutes, title="Usercount series"):
    days = np.arange(len(values)) * step_minutes / 1440.0
    fig, ax = plt.subplots(figsize=(12, 3.5))
    ax.plot(days, values, lw=0.6, color="tab:blue")
    ax.set_xlabel("days since start")
    ax.set_ylabel("devices")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def plot_days(path, X, day_labels):
    n, m = X.shape
    fig, ax = plt.subplots(figsize=(8, 4))
    colors = plt.cm.viridis(np.linspace(0, 1, m))
    for i in range(m):
        ax.plot(_hours(n), X[:, i], lw=0.6, color=colors[i], alpha=0.7)
    ax.set_xlabel("hour of day")
    ax.set_ylabel("devices")
    ax.set_title(f"All {m} days ({day_labels[0]} to {day_labels[-1]})")
    fig.tight_layout()
    _save(fig, path)


def plot_components(path, W):
    n, k = W.shape
    norms = np.abs(W).sum(axis=0)
    norms[norms == 0] = 1.0
    fig, ax = plt.subplots(figsize=(8, 4))
    for j in range(k):
        ax.plot(_hours(n), W[:, j] / norms[j], label=f"W{j + 1}")
    ax.set_xlabel("hour of day")
    ax.set_yticks([])
    ax.set_title("Daily patterns (columns of W, unit L1)")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_weighted(path, Hw, day_labels):
    k, m = Hw.shape
    fig, ax = plt.subplots(figsize=(12, 4))
    bottom = np.zeros(m)
    x = np.arange(m)
    for j in range(k):
        ax.bar(x, Hw[j] / 60.0, bottom=bottom, label=f"W{j + 1}", width=0.85)
        bottom += Hw[j] / 60.0
    ticks = x[:: max(1, m // 12)]
    ax.set_xticks(ticks)
    ax.set_xticklabels([day_labels[i] for i in ticks], rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("device-hours per day")
    ax.set_title("Weighted activations")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_sweep(path, ks, mse, suggested_k=None):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(ks, mse, "o-")
    if suggested_k is not None:
        ax.axvline(suggested_k, color="gray", ls="--", lw=0.8, label=f"suggested k={suggested_k} (advisory)")
        ax.legend()
    ax.set_xlabel("inner dimension k")
    ax.set_ylabel("MSE")
    ax.set_title("Reconstruction error vs k")
    fig.tight_layout()
    _save(fig, path)


def write_fit_plots(directory, *, series_values, step_minutes, X, day_labels, W, Hw, sweep=None):
    directory = Path(directory)
    plot_series(directory / "series.svg", series_values, step_minutes)
    plot_days(directory / "days.svg", X, day_labels)
    plot_components(directory / "components.svg", W)
    plot_weighted(directory / "weighted_activations.svg", Hw, day_labels)
    if sweep is not None:
        plot_sweep(directory / "mse_vs_k.svg", sweep.ks, sweep.mse, sweep.suggested_k)
