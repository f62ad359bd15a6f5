"""Figure rendering for the report path.

Each plot is written next to its CSV counterpart so a run directory is
self-contained. Uses the non-interactive backend; nothing here opens a
window.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluate import RocResult, TimeWindowProfile
from .objectives import EpochStats


def save_training_curves(log: Sequence[EpochStats], path: str | Path) -> None:
    """Loss components (left axis) and heldout AUC (right axis) by epoch."""
    epochs = [row.epoch for row in log]
    fig, ax = plt.subplots(figsize=(7, 4.2))
    ax.plot(epochs, [r.l_prox for r in log], label="proximity", color="tab:blue")
    ax.plot(epochs, [r.l_stance for r in log], label="stance", color="tab:orange")
    ax.plot(epochs, [r.l_news for r in log], label="news", color="tab:green")
    ax.plot(epochs, [r.l_total for r in log], label="total", color="black", lw=1.8)
    ax.set_xlabel("epoch")
    ax.set_ylabel("loss")
    ax2 = ax.twinx()
    aucs = [r.val_auc for r in log]
    if any(not math.isnan(a) for a in aucs):
        ax2.plot(epochs, aucs, label="heldout AUC", color="tab:red", ls="--")
        ax2.set_ylabel("heldout AUC")
        ax2.set_ylim(0.0, 1.0)
    lines, labels = ax.get_legend_handles_labels()
    lines2, labels2 = ax2.get_legend_handles_labels()
    ax.legend(lines + lines2, labels + labels2, loc="center right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_roc_curve(roc: RocResult, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(4.4, 4.2))
    xs = [p[0] for p in roc.points]
    ys = [p[1] for p in roc.points]
    ax.plot(xs, ys, color="tab:blue")
    ax.plot([0, 1], [0, 1], color="gray", ls=":", lw=1)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(f"AUC = {roc.auc:.4f}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _window_names(windows) -> list[str]:
    names = []
    for lo, hi in windows:
        if math.isinf(hi):
            names.append(f"{lo:g}h+")
        else:
            names.append(f"{lo:g}-{hi:g}h")
    return names


def save_attention_profile(profile: TimeWindowProfile, path: str | Path) -> None:
    """Grouped bars of mean attention mass per time window, fake vs real."""
    names = _window_names(profile.windows)
    x = range(len(names))
    width = 0.38
    fig, ax = plt.subplots(figsize=(5.4, 4.0))
    ax.bar([i - width / 2 for i in x], profile.fake_mass, width,
           label=f"fake (n={profile.num_fake})", color="tab:red")
    ax.bar([i + width / 2 for i in x], profile.real_mass, width,
           label=f"real (n={profile.num_real})", color="tab:green")
    ax.set_xticks(list(x))
    ax.set_xticklabels(names)
    ax.set_ylabel("mean attention mass")
    ax.set_xlabel("time since publication")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
