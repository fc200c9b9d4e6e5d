"""Matplotlib figures for the CLI reports (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def learning_curves(history, path, title: str = "") -> None:
    epochs = [r.epoch for r in history]
    fig, (ax_acc, ax_loss) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_acc.plot(epochs, [r.train_acc for r in history], "o-", label="train")
    ax_acc.plot(epochs, [r.test_acc for r in history], "s-", label="test")
    ax_acc.set_xlabel("epoch")
    ax_acc.set_ylabel("accuracy")
    ax_acc.set_ylim(0, 1.05)
    ax_acc.legend()
    ax_loss.plot(epochs, [r.train_loss for r in history], "o-", label="train")
    ax_loss.plot(epochs, [r.test_loss for r in history], "s-", label="test")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("loss")
    ax_loss.legend()
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def confusion_plot(cm: np.ndarray, names, path) -> None:
    fig, ax = plt.subplots(figsize=(4, 4))
    ax.imshow(cm, cmap="Blues")
    for i in range(cm.shape[0]):
        for j in range(cm.shape[1]):
            ax.text(j, i, str(cm[i, j]), ha="center", va="center")
    ax.set_xticks(range(len(names)), names, rotation=45)
    ax.set_yticks(range(len(names)), names)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def heatmap_plot(tfmaps, path, titles=None) -> None:
    """Side-by-side panels, frequency up, time across."""
    fig, axes = plt.subplots(1, len(tfmaps), figsize=(4 * len(tfmaps), 3.5), squeeze=False)
    for k, (ax, m) in enumerate(zip(axes[0], tfmaps)):
        extent = [m.time_axis[0], m.time_axis[-1], m.freq_axis[0], m.freq_axis[-1]]
        ax.imshow(m.values, origin="lower", aspect="auto", extent=extent, cmap="jet")
        ax.set_xlabel("time (s)")
        ax.set_ylabel("frequency (Hz)")
        if titles:
            ax.set_title(titles[k])
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def sweep_plot(rows, axis: str, path) -> None:
    """Epochs-to-threshold and final accuracy against the swept value."""
    values = [r["value"] for r in rows]
    pos = np.arange(len(values))
    fig, (ax_ep, ax_acc) = plt.subplots(1, 2, figsize=(8, 3.5))
    ax_ep.bar(pos, [r["epochs_mean"] for r in rows], yerr=[r["epochs_std"] for r in rows], capsize=4)
    ax_ep.set_ylabel("epochs to 0.9 test accuracy")
    ax_acc.bar(pos, [r["accuracy_mean"] for r in rows], yerr=[r["accuracy_std"] for r in rows], capsize=4)
    ax_acc.set_ylabel("final test accuracy")
    ax_acc.set_ylim(0, 1.05)
    for ax in (ax_ep, ax_acc):
        ax.set_xticks(pos, [f"{v:g}" for v in values])
        ax.set_xlabel(f"{axis} (m)")
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
