"""Figures for the report paths of the command line tool.

Every function writes one PNG into ``out_dir`` and returns its path.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import ALL_OPS, Codebook, constrained_mask  # noqa: E402

_VERDICT_CODES = {"RELIABLE": 2, "MIXED": 1, "UNRELIABLE": 0, "NO_CLAIM": -1, "n/a": -2}


def _save(fig, out_dir, name: str) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    fig.savefig(path, dpi=110, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def table_heatmaps(ts, out_dir, cb: Codebook | None = None, name: str = "tables.png") -> Path:
    """One panel per operation; constrained cells are outlined when a codebook is given."""
    fig, axes = plt.subplots(1, 4, figsize=(13, 3.6))
    lo, hi = ts.origin, ts.origin + ts.size - 1
    ticks = np.arange(ts.size)
    for ax, op in zip(axes, ALL_OPS):
        im = ax.imshow(ts.tables[op], cmap="viridis", vmin=lo, vmax=hi)
        ax.set_title(op.value)
        if ts.size <= 16:
            ax.set_xticks(ticks, [str(v + ts.origin) for v in ticks], fontsize=7)
            ax.set_yticks(ticks, [str(v + ts.origin) for v in ticks], fontsize=7)
        if cb is not None:
            rr, cc = np.nonzero(constrained_mask(cb, op))
            ax.scatter(cc, rr, s=8, c="white", marker="s", linewidths=0)
    fig.colorbar(im, ax=axes, shrink=0.8, label="cipher value")
    return _save(fig, out_dir, name)


def attack_grid(summary: dict[str, dict[str, str]], out_dir, name: str = "attacks.png") -> Path:
    """Schemes by attacks, coloured by verdict."""
    schemes = list(summary)
    kinds = sorted({k for row in summary.values() for k in row})
    codes = np.array([[_VERDICT_CODES.get(summary[s].get(k, "n/a"), -2) for k in kinds] for s in schemes])
    fig, ax = plt.subplots(figsize=(1.4 * len(kinds) + 1.5, 0.6 * len(schemes) + 1.2))
    ax.imshow(codes, cmap="RdYlGn_r", vmin=-2, vmax=2, aspect="auto")
    ax.set_xticks(range(len(kinds)), kinds, rotation=30, ha="right")
    ax.set_yticks(range(len(schemes)), schemes)
    for i, s in enumerate(schemes):
        for j, k in enumerate(kinds):
            ax.text(j, i, summary[s].get(k, "n/a"), ha="center", va="center", fontsize=7)
    return _save(fig, out_dir, name)


def closure_growth(by_ops: dict[int, int], out_dir, name: str = "closure.png") -> Path:
    """Distinct signatures realisable with exactly k operations."""
    ks = sorted(by_ops)
    fig, ax = plt.subplots(figsize=(5, 3))
    ax.plot(ks, [by_ops[k] for k in ks], marker="o")
    ax.set_xlabel("operations")
    ax.set_ylabel("signatures")
    ax.grid(alpha=0.3)
    return _save(fig, out_dir, name)


def embedding_cells(masks: list[np.ndarray], size: int, out_dir, name: str = "embeddings.png") -> Path:
    """Which ADD cells each embedding of a compatible set constrains."""
    fig, ax = plt.subplots(figsize=(4, 4))
    grid = np.zeros((size, size))
    for i, mask in enumerate(masks, start=1):
        grid[mask] = i
    ax.imshow(grid, cmap="tab10", vmin=0, vmax=10)
    ax.set_title("constrained cells by embedding")
    return _save(fig, out_dir, name)
