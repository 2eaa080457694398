"""Figures of nested iterates from a membership raster."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import ListedColormap  # noqa: E402
from matplotlib.patches import Patch  # noqa: E402

from .io import Raster  # noqa: E402


def depth_image(raster: Raster) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Grid axes and, per node, the number of iterates containing it."""
    xs = sorted({float(x) for x, _ in raster.nodes})
    ys = sorted({float(y) for _, y in raster.nodes})
    depth = np.array([sum(row) for row in raster.flags], dtype=int).reshape(len(ys), len(xs))
    return np.array(xs), np.array(ys), depth


def plot_raster(raster: Raster, path: str | Path, title: str | None = None,
                trajectories: list[np.ndarray] | None = None, dpi: int = 150) -> Path:
    """Shade ``X_0 ⊇ X_1 ⊇ ...`` in progressively darker grays and save."""
    xs, ys, depth = depth_image(raster)
    K = raster.k_last + 1
    shades = ["white"] + [str(0.9 - 0.25 * k / max(K - 1, 1)) for k in range(K)]
    cmap = ListedColormap(shades)
    fig, ax = plt.subplots(figsize=(5, 5))
    dx = (xs[1] - xs[0]) / 2 if len(xs) > 1 else 0.5
    dy = (ys[1] - ys[0]) / 2 if len(ys) > 1 else 0.5
    ax.imshow(depth, origin="lower", cmap=cmap, vmin=0, vmax=K, interpolation="nearest",
              extent=(xs[0] - dx, xs[-1] + dx, ys[0] - dy, ys[-1] + dy))
    for traj in trajectories or []:
        ax.plot(traj[:, 0], traj[:, 1], ":", color="k", lw=0.8, marker="o", ms=2.5)
    ax.set_xlabel(r"$x_1$")
    ax.set_ylabel(r"$x_2$")
    ax.set_aspect("equal")
    handles = [Patch(facecolor=shades[k + 1], edgecolor="0.4", label=f"$X_{{{k}}}$") for k in range(K)]
    ax.legend(handles=handles, loc="upper right", fontsize=8, framealpha=0.9)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path


def sample_trajectories(f, starts, steps: int = 8) -> list[np.ndarray]:
    """Float trajectories of ``f`` from a few starting points, for overlays."""
    from .interval import CompiledPolynomial

    comps = [CompiledPolynomial(c, with_gradient=False) for c in f.components]
    out = []
    for s in starts:
        pts = [np.asarray(s, dtype=float)]
        for _ in range(steps):
            pts.append(np.array([c.approx(pts[-1][None, :])[0] for c in comps]))
        out.append(np.array(pts))
    return out
