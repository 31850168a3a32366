"""Artifact emitters for the CLI: PPM images, figure rendering, CSV dumps.

Spectrogram images are written twice: as dependency-free P5 grayscale PPMs
(the machine-checkable contract) and as matplotlib PNG figures for humans.
All emitters are deterministic given the same inputs.
"""

import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .dsp import HOP, SAMPLE_RATE, Signal
from .metrics import ConfusionMatrix


def write_ppm(path, matrix: np.ndarray) -> None:
    """Write a (T, F) feature matrix as a P5 grayscale image.

    The image is F pixels tall (frequency, low bins at the bottom) and T
    pixels wide (time); values are min-max scaled per image to 0..255.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    lo, hi = m.min(), m.max()
    scaled = np.zeros_like(m) if hi == lo else (m - lo) / (hi - lo)
    img = np.round(255.0 * scaled.T[::-1, :]).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_ppm_header(path) -> tuple:
    """Return (width, height) of a P5 file; used by tests and sanity checks."""
    with open(path, "rb") as fh:
        magic = fh.readline().strip()
        if magic != b"P5":
            raise ValueError(f"{path}: not a P5 PPM")
        dims = fh.readline().split()
        return int(dims[0]), int(dims[1])


def write_waveform_csv(path, signal: Signal) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample_index", "amplitude"])
        for i, v in enumerate(signal.samples):
            writer.writerow([i, f"{v:.6f}"])


def _feature_extent(n_frames: int):
    return (0.0, n_frames * HOP / SAMPLE_RATE, 0.0, SAMPLE_RATE / 2.0 / 1000.0)


def plot_spectrogram_pair(path, input_feat: np.ndarray, output_feat: np.ndarray,
                          titles=("input", "output")) -> None:
    """Side-by-side scaled-feature heatmaps (the conversion comparison figure)."""
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, feat, title in zip(axes, (input_feat, output_feat), titles):
        im = ax.imshow(np.asarray(feat).T, origin="lower", aspect="auto",
                       extent=_feature_extent(feat.shape[0]), cmap="magma",
                       vmin=0.0, vmax=1.0)
        ax.set_title(title)
        ax.set_xlabel("time (s)")
    axes[0].set_ylabel("frequency (kHz)")
    fig.colorbar(im, ax=axes, fraction=0.025)
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_waveform_pair(path, input_sig: Signal, output_sig: Signal) -> None:
    fig, axes = plt.subplots(2, 1, figsize=(10, 4), sharex=True)
    for ax, sig, title in zip(axes, (input_sig, output_sig), ("input", "converted")):
        t = np.arange(len(sig)) / sig.sample_rate
        ax.plot(t, sig.samples, linewidth=0.4)
        ax.set_ylabel(title)
        ax.set_ylim(-1.05, 1.05)
    axes[1].set_xlabel("time (s)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_confusion(path, cm: ConfusionMatrix, title: str = "confusion matrix") -> None:
    norm = cm.normalized()
    n = len(cm.class_names)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(norm, cmap="Blues", vmin=0.0, vmax=1.0)
    ax.set_xticks(range(n), cm.class_names, rotation=45)
    ax.set_yticks(range(n), cm.class_names)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(title)
    for i in range(n):
        for j in range(n):
            color = "white" if norm[i, j] > 0.5 else "black"
            ax.text(j, i, str(int(cm.counts[i, j])), ha="center", va="center",
                    color=color, fontsize=9)
    fig.colorbar(im, ax=ax, fraction=0.045)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)


def plot_metrics(path, rows, title: str = "training metrics") -> None:
    """Loss (and accuracy, if present) trajectories from MetricsLog rows."""
    by_split = {}
    for epoch, split, total, cls, dec, acc in rows:
        by_split.setdefault(split, []).append((epoch, total, cls, dec, acc))
    has_acc = any(r[4] is not None for rs in by_split.values() for r in rs)
    n_axes = 2 if has_acc else 1
    fig, axes = plt.subplots(1, n_axes, figsize=(5.5 * n_axes, 4))
    axes = np.atleast_1d(axes)
    for split, rs in sorted(by_split.items()):
        epochs = [r[0] for r in rs]
        axes[0].plot(epochs, [r[1] for r in rs], marker="o", markersize=3,
                     label=f"{split} total")
        if any(r[3] is not None for r in rs):
            axes[0].plot(epochs, [r[2] for r in rs], linestyle="--", label=f"{split} cls")
            axes[0].plot(epochs, [r[3] for r in rs], linestyle=":", label=f"{split} dec")
        if has_acc:
            axes[1].plot(epochs, [r[4] for r in rs], marker="o", markersize=3,
                         label=split)
    axes[0].set_xlabel("epoch")
    axes[0].set_ylabel("loss")
    axes[0].legend(fontsize=8)
    axes[0].set_title(title)
    if has_acc:
        axes[1].set_xlabel("epoch")
        axes[1].set_ylabel("accuracy")
        axes[1].set_ylim(0.0, 1.02)
        axes[1].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
