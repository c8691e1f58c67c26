"""Figure rendering for the report commands.

All figures are written straight to files with the Agg backend; nothing
here opens a window.  Each function takes the same row dictionaries the
CSV writers consume, so a plot is always a view of the delimited output
and never a separate computation.
"""

from __future__ import annotations

from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import FormatStrFormatter  # noqa: E402

__all__ = [
    "plot_repeat_decay",
    "plot_census_histogram",
    "plot_tensor_k_bench",
]


def plot_repeat_decay(rows: Sequence[Dict], path: str, title: str = "") -> str:
    """Semilog decay of the repeated value: exact where available, the
    sandwich bounds everywhere."""
    ns = [row["n"] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ns, [float(row["lower"]) for row in rows], "s--", label="lower")
    ax.semilogy(ns, [float(row["upper"]) for row in rows], "^--", label="upper")
    exact_pts = [(row["n"], float(row["exact"])) for row in rows if row["exact"] is not None]
    if exact_pts:
        ax.semilogy(*zip(*exact_pts), "o-", label="exact")
    ax.set_xlabel("repetitions n")
    ax.set_ylabel("value")
    ax.set_xticks(ns)
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_census_histogram(values: Sequence[float], n_rigid: int, n_total: int,
                          path: str, title: str = "") -> str:
    """Histogram of the worst game values seen across a census."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(list(values), bins=20, edgecolor="black")
    ax.set_xlabel("worst repeated-game value")
    ax.set_ylabel("count")
    label = f"rigid: {n_rigid}/{n_total}"
    ax.set_title(title or label)
    if title:
        ax.text(0.98, 0.95, label, ha="right", va="top", transform=ax.transAxes)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_tensor_k_bench(rows: Sequence[Dict], path: str, title: str = "") -> str:
    """Steps per row against n, with the reported bound constant for scale."""
    ns = [row["n"] for row in rows]
    per_row = [row["steps"] / row["n"] for row in rows]
    bound = [row["step_bound"] / row["n"] for row in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ns, per_row, "o-", label="steps / n")
    ax.plot(ns, bound, "--", color="gray", label="bound / n")
    ax.set_xlabel("rows n")
    ax.set_ylabel("steps per row")
    ax.set_xscale("log", base=2)
    ax.set_xticks(ns)
    ax.get_xaxis().set_major_formatter(FormatStrFormatter("%d"))
    if title:
        ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
