"""Matplotlib figures for the ``report`` command."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "svg.hashsalt": "lanevote",
    "path.simplify": False,
}


def _save(fig, path):
    # fixed metadata keeps repeated runs byte-identical
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None} if str(path).endswith(".png") else None)
    plt.close(fig)


def plot_seed_sweep(rows, path):
    """FN and FP rates against seed count, before and after suppression."""
    ks = [r["k"] for r in rows]
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.2, 2.8))
        ax.plot(ks, [100 * r["fn_rate"] for r in rows], "o-", label="FN")
        ax.plot(ks, [100 * r["fp_rate_raw"] for r in rows], "s--", label="FP (all seeds)")
        ax.plot(ks, [100 * r["fp_rate"] for r in rows], "^-", label="FP (after suppression)")
        ax.set_xscale("log")
        ax.set_xticks(ks)
        ax.set_xticklabels([str(k) for k in ks])
        ax.set_xlabel("seed count k")
        ax.set_ylabel("rate (%)")
        ax.legend(frameon=False)
        _save(fig, path)


def plot_attention(attn, path, lane_ids=None):
    """Heat map of a K x K attention matrix."""
    attn = np.asarray(attn)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(3.4, 3.0))
        im = ax.imshow(attn, cmap="coolwarm", vmin=0.0, vmax=1.0)
        k = attn.shape[0]
        ax.set_xticks(range(k))
        ax.set_yticks(range(k))
        if lane_ids is not None:
            ax.set_yticklabels([f"{i} (L{l})" for i, l in enumerate(lane_ids)])
        ax.set_xlabel("seed")
        fig.colorbar(im, ax=ax, fraction=0.046, pad=0.04)
        _save(fig, path)


def plot_centerness_profiles(s, box, curve, path):
    """Box vs arc-length centerness along one lane."""
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(4.2, 2.6))
        ax.plot(s, box, label="box")
        ax.plot(s, curve, label="arc length")
        ax.set_xlabel("arc fraction")
        ax.set_ylabel("centerness")
        ax.set_ylim(-0.02, 1.05)
        ax.legend(frameon=False)
        _save(fig, path)
